"""Photon redshift tests: COW-type phase and HOM-type delay, ground to orbit.

Prints the single-pass error on the redshift-violation parameter alpha for
the bundled reference scenarios, then the HOM delay for the lunar Gateway.
"""
import numpy as np

from dsqlsim import cowsim, homsim
from dsqlsim.constants import angular_frequency_split
from dsqlsim.experiments import run_experiment
from dsqlsim.scenario import load_scenario, resolve

ifo = cowsim.CowInterferometer(1550e-9, 400e3, 6e3)
print(f"COW phase at 400 km with a 6 km delay line: {cowsim.gravitational_phase(ifo):.3f} rad")
for p in (0.8, 0.95, 1.0):
    opt = cowsim.optimal_phase_error(cowsim.CowSignalModel(1e13, p), ifo)
    print(f"  p={p:.2f}: best per-photon phase error {opt.dphi_opt:.3g} rad at phi={opt.phi_opt:.3f}")

cow = run_experiment(load_scenario(resolve("cow_fig4")), None, 1)
print(f"\nCOW alpha scan: best altitude {cow.summary['argmin_altitude_km']:.0f} km, "
      f"delta alpha {cow.summary['min_delta_alpha']:.2e}")

hom = run_experiment(load_scenario(resolve("hom_fig9_nondegenerate")), None, 1).summary
for mode in ("degenerate", "nondegenerate"):
    s = hom[mode]
    print(f"HOM {mode:>13}: best delta alpha {s['min_delta_alpha']:.2e} at "
          f"{s['argmin_altitude_km']:.0f} km, sigma {s['argmin_sigma_rad_s']:.2g} rad/s")
r = hom["ratio"]
print(f"degenerate / nondegenerate ratio over {r['cells']} cells: "
      f"min {r['min']:.1f}, median {r['median']:.0f}")

tau = homsim.relativistic_time_shift(homsim.gateway_geometry(1e3))
domega = angular_frequency_split(1500e-9, 1600e-9)
print(f"\nGateway, 1 km delay: time shift {tau:.3e} s, "
      f"HOM phase {homsim.hom_phase_shift(domega, tau):.3f} rad at 1500/1600 nm")

sigma = 1e13
print(f"\nper-pair delay error at sigma = {sigma:.0e} rad/s, p = 0.95:")
for k in (0.0, 1.0, 2.0, 4.0):
    opt = homsim.optimal_timing_error(sigma, k * sigma, 0.95)
    print(f"  domega = {k:.0f} sigma: {opt.dtau_opt * sigma:.3f} / sigma at tau = "
          f"{opt.tau_opt * sigma:.2f} / sigma")
