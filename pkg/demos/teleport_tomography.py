"""Teleportation verification by two-qubit tomography of Werner states.

Maps the mean reconstructed fidelity to the Bell state over Werner parameter
and event count, then converts an event budget into link time.
"""

from dsqlsim import teleportsim as tp
from dsqlsim.linkbudget import OpticalTerminal, SourceSpec

p_values = [0.0, 0.5, 0.75, 0.95]
n_values = [100, 1700, 10000]
fmap = tp.fidelity_map(p_values, n_values, reps=10, seed=11, workers=2)
print("mean fidelity (stddev) over 10 reconstructions")
print(f"{'p':>6} " + " ".join(f"{'N=' + str(n):>16}" for n in n_values) + f" {'exact':>7}")
for i, p in enumerate(p_values):
    cells = " ".join(f"{fmap.mean[i, j]:9.3f} ({fmap.std[i, j]:.3f})" for j in range(len(n_values)))
    print(f"{p:6.2f} {cells} {(1 + 3 * p) / 4:7.3f}")
print("classical teleportation limit: 2/3")

composed = tp.teleport_scenario_rate(tp.TeleportScenario(
    SourceSpec(1e9, 0.01), OpticalTerminal(0.5, 1.05), OpticalTerminal(1.0), 810e-9, 12.742e6))
for label, rate in (("composed link", composed), ("pinned 250/s", tp.TeleportRate(250.0))):
    print(f"{label:>14}: {rate.events_per_s:7.0f} events/s, "
          f"1700 events in {rate.time_for_counts(1700):.2f} s")
