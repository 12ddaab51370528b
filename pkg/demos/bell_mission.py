"""Bell-test mission budget: link efficiency, pair rate and significance vs source range.

Two terminal designs are compared over range; significance is the expected
CHSH violation in standard deviations after one pass (clamped to 1 h beyond GEO).
"""
import numpy as np

from dsqlsim import bellstats as bs
from dsqlsim.linkbudget import LossFactors, OpticalTerminal, SourceSpec, link_efficiency

SOURCE = SourceSpec(1e9, 0.01)
LOSSES = LossFactors.lumped(0.1)
DESIGNS = {
    "0.3 m -> 1.0 m, 1550 nm": (OpticalTerminal(0.3), OpticalTerminal(1.0), 1550e-9),
    "0.5 m -> 3.5 m, 810 nm": (OpticalTerminal(0.5, 1.05), OpticalTerminal(3.5), 810e-9),
}
ranges = np.array([500e3, 2e6, 12.742e6, 36e6, 384.4e6])
p_values = np.array([0.80, 0.85, 0.90, 0.95])

for label, (tx, rx, lam) in DESIGNS.items():
    sc = bs.BellScenario(SOURCE, tx, rx, lam, LOSSES)
    res = bs.bell_mission_scan(ranges, p_values, sc)
    print(f"\n{label}")
    print(f"{'range km':>10} {'eta':>9} {'pairs/s':>9} {'T s':>7} "
          + " ".join(f"{'p=' + format(p, '.2f'):>7}" for p in p_values))
    for i, r in enumerate(ranges):
        eta = link_efficiency(tx, rx, r, lam, LOSSES)
        sig = " ".join(f"{s:7.1f}" for s in res.n_sigma[i])
        print(f"{r / 1e3:10.0f} {eta:9.2e} {res.pair_rate[i]:9.3g} "
              f"{res.integration_time[i]:7.0f} {sig}")

print("\npairs needed for a 3 sigma violation:")
for p in p_values:
    print(f"  p={p:.2f}: {bs.required_counts(p, 3.0)}")
