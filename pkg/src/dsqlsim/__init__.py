"""Mission-scale models for quantum optics experiments in space.

Relativistic clock offsets, optical link budgets, Bell-test statistics,
single-photon and two-photon gravitational interferometry, teleportation
tomography and gravitational decoherence estimates, plus a scenario-driven CLI.
"""
__version__ = "0.1.0"
