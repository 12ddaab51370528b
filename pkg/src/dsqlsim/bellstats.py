"""CHSH statistics, coincidence-rate modelling and Bell-test mission scans.

The measured state is modelled as a Bell-state fraction ``p`` mixed with white
noise.  Coincidence tallies are kept in a 4x4 array: one row per CHSH setting
pair, columns ordered (a,b), (a_perp,b_perp), (a,b_perp), (a_perp,b).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, InfeasibleError, NoiseSaturationError
from .linkbudget import (LossFactors, OpticalTerminal, SourceSpec, entangled_pair_rate,
                         link_efficiency)
from .relorbit import EARTH, Body, PassGeometry, geostationary_radius, integration_time
from .seeding import cell_rng

SQRT2 = math.sqrt(2.0)
LOCAL_BOUND_P = 1.0 / SQRT2

# (alice angle, bob angle) for the four CHSH terms, in the order they are summed
SETTINGS = ((0.0, math.pi / 8), (0.0, -math.pi / 8),
            (math.pi / 4, math.pi / 8), (math.pi / 4, -math.pi / 8))
_SIGNS = np.array([1.0, 1.0, 1.0, -1.0])


class PoissonApproximationWarning(UserWarning):
    """Counting rate times window is not small; accidental formula degrades."""


@dataclass(frozen=True)
class MixedBellState:
    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"Bell fraction must lie in [0, 1], got {self.p}")

    def correlation(self, a: float, b: float) -> float:
        return self.p * math.cos(2.0 * (a - b))


@dataclass(frozen=True)
class BellCounts:
    counts: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts)
        if arr.shape != (4, 4):
            raise DomainError(f"expected 4x4 tallies, got shape {arr.shape}")
        if np.any(arr < 0):
            raise DomainError("tallies must be non-negative")
        object.__setattr__(self, "counts", arr)

    @property
    def N(self):
        return self.counts.sum()


@dataclass(frozen=True)
class RatesModel:
    r_e: float
    r_i: float = 0.0
    eta_a: float = 1.0
    eta_b: float = 1.0
    n_a: float = 0.0
    n_b: float = 0.0
    t_window: float = 1e-9

    def __post_init__(self) -> None:
        for name, v in vars(self).items():
            if v < 0:
                raise DomainError(f"{name} must be non-negative")
        if self.eta_a > 1 or self.eta_b > 1:
            raise DomainError("efficiencies must not exceed 1")

    @property
    def r_alice(self) -> float:
        return (self.r_e + self.r_i) * self.eta_a + self.n_a

    @property
    def r_bob(self) -> float:
        return (self.r_e + self.r_i) * self.eta_b + self.n_b


def correlation_coefficient(block: Sequence[float]) -> float:
    """E from one block of four tallies ordered (ab, a'b', ab', a'b)."""
    n_ab, n_pp, n_ap, n_pa = (float(x) for x in block)
    total = n_ab + n_pp + n_ap + n_pa
    if not total > 0:
        raise DomainError("correlation undefined for an empty block")
    return (n_ab + n_pp - n_ap - n_pa) / total


def chsh_s(counts: BellCounts) -> float:
    return float(sum(s * correlation_coefficient(row)
                     for s, row in zip(_SIGNS, counts.counts)))


def expected_s(p: float) -> float:
    MixedBellState(p)
    return 2.0 * SQRT2 * p


def sigma_s(N: float, p: float) -> float:
    """Expected standard deviation of S from Poisson counting over N coincidences."""
    if not N > 0:
        raise DomainError("need a positive number of coincidences")
    return math.sqrt(8.0 * (2.0 - p * p) / N)


def n_sigma(N: float, p: float) -> float:
    """Expected number of standard deviations by which S exceeds 2."""
    if not N > 0:
        raise DomainError("need a positive number of coincidences")
    MixedBellState(p)
    return math.sqrt(N) * (p - LOCAL_BOUND_P) / math.sqrt(2.0 - p * p)


def required_counts(p: float, n_target: float) -> int:
    """Smallest N whose expected significance reaches ``n_target``."""
    MixedBellState(p)
    if not p > LOCAL_BOUND_P:
        raise InfeasibleError("no violation is possible unless p > 1/sqrt(2)")
    if n_target <= 0:
        return 1
    N = max(1, math.ceil(n_target**2 * (2.0 - p * p) / (p - LOCAL_BOUND_P) ** 2))
    # guard the ceiling against rounding in either direction
    while N > 1 and n_sigma(N - 1, p) >= n_target:
        N -= 1
    while n_sigma(N, p) < n_target:
        N += 1
    return N


def accidental_rate(m: RatesModel) -> float:
    ra, rb = m.r_alice, m.r_bob
    if max(ra, rb) * m.t_window >= 0.1:
        warnings.warn("r*t >= 0.1: Poisson small-rate approximation is poor",
                      PoissonApproximationWarning, stacklevel=2)
    return ra * rb * m.t_window


def entangled_coincidence_rate(m: RatesModel) -> float:
    return m.r_e * m.eta_a * m.eta_b


def purity_from_rates(m: RatesModel) -> float:
    ent = entangled_coincidence_rate(m)
    if not ent > 0:
        raise DomainError("purity undefined without entangled coincidences")
    return 1.0 / (1.0 + accidental_rate(m) / ent)


def effective_purity(fidelity: float, noise_rate: float, dt_r: float) -> float:
    """Quality factor (1 - N_noise*dt) * F."""
    pn = noise_rate * dt_r
    if not pn < 1.0:
        raise NoiseSaturationError(f"noise probability per window is {pn:.3g} >= 1")
    return (1.0 - pn) * fidelity


def poisson_window(rate: float, t: float, k: int) -> float:
    """Probability of exactly ``k`` arrivals in a window ``t``."""
    if rate < 0 or t < 0 or k < 0:
        raise DomainError("rate, window and k must be non-negative")
    mu = rate * t
    return math.exp(k * math.log(mu) - mu - math.lgamma(k + 1)) if mu > 0 else float(k == 0)


def poisson_at_least_one(rate: float, t: float) -> float:
    if rate < 0 or t < 0:
        raise DomainError("rate and window must be non-negative")
    return -math.expm1(-rate * t)


def outcome_probabilities(p: float) -> np.ndarray:
    """Joint probability of each of the 16 tallies, settings chosen uniformly."""
    state = MixedBellState(p)
    probs = np.empty((4, 4))
    for i, (a, b) in enumerate(SETTINGS):
        E = state.correlation(a, b)
        probs[i] = 0.25 * np.array([1 + E, 1 + E, 1 - E, 1 - E]) / 4.0
    return probs


def expected_counts(p: float, N: float) -> BellCounts:
    return BellCounts(N * outcome_probabilities(p))


def simulate_bell_counts(p: float, N: int, rng_seed) -> BellCounts:
    """Multinomial draw of N coincidences; ``rng_seed`` may be an int or Generator."""
    if not N > 0:
        raise DomainError("need a positive number of trials")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else cell_rng(rng_seed)
    flat = rng.multinomial(int(N), outcome_probabilities(p).ravel())
    return BellCounts(flat.reshape(4, 4))


def significance_grid(N_values: Sequence[float], p_values: Sequence[float]) -> np.ndarray:
    """n_sigma over an (N, p) grid, rows indexed by N; no-violation cells read 0."""
    out = np.zeros((len(N_values), len(p_values)))
    for i, N in enumerate(N_values):
        for j, p in enumerate(p_values):
            out[i, j] = max(0.0, n_sigma(N, p)) if p > LOCAL_BOUND_P else 0.0
    return out


@dataclass(frozen=True)
class BellScenario:
    """Symmetric two-channel link from a source to Alice and Bob."""

    source: SourceSpec
    tx: OpticalTerminal
    rx: OpticalTerminal
    wavelength: float
    losses: LossFactors = LossFactors()
    theta_m: float = math.radians(20.0)
    body: Body = EARTH
    clamp_time: float = 3600.0
    # overrides the pass geometry when set (e.g. a fixed campaign duration)
    fixed_time: Optional[float] = None


@dataclass(frozen=True)
class BellScanResult:
    p_values: np.ndarray
    ranges: np.ndarray
    integration_time: np.ndarray
    pair_rate: np.ndarray
    n_pairs: np.ndarray
    n_sigma: np.ndarray = field(repr=False)  # shape (len(ranges), len(p_values))


def pass_time(range_: float, sc: BellScenario) -> float:
    """Integration time for a source at ``range_`` above the ground station.

    Earth-orbit passes use the closed-form pass duration; beyond geostationary
    altitude the time is clamped to ``sc.clamp_time``.
    """
    if sc.fixed_time is not None:
        return sc.fixed_time
    a = sc.body.radius + range_
    if a >= geostationary_radius(sc.body):
        return sc.clamp_time
    return integration_time(PassGeometry(a, sc.theta_m, sc.body))


def bell_mission_scan(ranges: Sequence[float], p_values: Sequence[float],
                      scenario: BellScenario) -> BellScanResult:
    ranges = np.asarray(ranges, dtype=float)
    p_values = np.asarray(p_values, dtype=float)
    T = np.empty_like(ranges)
    rate = np.empty_like(ranges)
    for i, rng_ in enumerate(ranges):
        eta = link_efficiency(scenario.tx, scenario.rx, rng_, scenario.wavelength,
                              scenario.losses)
        rate[i] = entangled_pair_rate(scenario.source, eta, eta)
        T[i] = pass_time(rng_, scenario)
    N = rate * T
    grid = np.zeros((len(ranges), len(p_values)))
    for i, n in enumerate(N):
        if n <= 0:
            continue
        for j, p in enumerate(p_values):
            if p > LOCAL_BOUND_P:
                grid[i, j] = n_sigma(n, p)
    return BellScanResult(p_values, ranges, T, rate, N, grid)


def sync_drift_budget(timing_window: float, integration_time: float) -> float:
    """Allowed clock drift rate (s/s) to stay inside the timing window."""
    if timing_window < 0 or not integration_time > 0:
        raise DomainError("window must be >= 0 and integration time > 0")
    return timing_window / integration_time
