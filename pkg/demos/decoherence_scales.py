"""Order-of-magnitude gravitational decoherence for a massive particle and for photons."""
from dsqlsim import decoherence as dc
from dsqlsim.constants import CONST

print(f"{'mass amu':>10} {'DP rate /s':>11} {'DP phase^2':>11}")
for amu in (1e6, 1e8, 1e10, 1e12):
    sys = dc.MassiveSystem.from_amu(amu, 100e-9, 10.0, 100e3)
    print(f"{amu:10.0e} {dc.gamma_dp(sys):11.2e} {dc.dp_dephasing(sys):11.2e}")
m = dc.mass_for_dp_dephasing(100e-9, 10.0, 100e3)
print(f"DP dephasing reaches 1 rad^2 at {m / CONST.amu:.2e} amu (100 nm, 10 m/s, 100 km)")

de = dc.energy_spread_for_rate(1e-3)
print(f"\nenergy-basis model at the Planck correlation time: 1e-3 /s needs dE = {de:.2e} J")
fast = dc.MassiveSystem.from_amu(1e10, 100e-9, 1e4, 100e3)
print(f"noise temperature for unit dephasing at 10 km/s: "
      f"{dc.theta_for_dephasing(fast) / CONST.T_P:.2e} T_P")

loss = dc.photon_visibility_loss(CONST.T_P, CONST.eV, 1e8)
print(f"\n1 eV photon over 1e5 km at T_P: phase spread {loss ** 0.5:.2e} rad, "
      f"needs {dc.photons_for_visibility(loss ** 0.5):.1e} photons to resolve")
