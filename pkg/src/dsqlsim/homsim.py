"""Hong-Ou-Mandel interference as a probe of the gravitational redshift.

Photon pairs (degenerate or frequency-entangled) go through a delay line on
the ground and a matched one on a spacecraft.  The relativistic rate offset
between the stations shifts the HOM dip by a time ``tau``.  Bandwidths
``sigma`` and frequency splits ``domega`` are angular frequencies (rad/s).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Optional, Sequence

import numpy as np

from .bellstats import effective_purity
from .constants import CONST, C, G, angular_frequency_split
from .errors import DomainError, InfeasibleError, NoiseSaturationError, SuperSynchronousError
from .linkbudget import (LossFactors, NoiseEnvironment, OpticalTerminal, SourceSpec,
                         entangled_pair_rate, link_efficiency, noise_rate)
from .optimize import grid_golden_minimize
from .relorbit import EARTH, Body, PassGeometry, integration_time

SIGMA_CAP = 4.7e13  # rad/s


@dataclass(frozen=True)
class HomSource:
    omega1: float
    omega2: float
    sigma: float

    def __post_init__(self) -> None:
        if not (self.omega1 > 0 and self.omega2 > 0 and self.sigma > 0):
            raise DomainError("frequencies and bandwidth must be positive")

    @property
    def degenerate(self) -> bool:
        return self.omega1 == self.omega2

    @property
    def domega(self) -> float:
        return abs(self.omega1 - self.omega2)


@dataclass(frozen=True)
class HomGeometry:
    """Station states for the time-shift formula.

    Potentials follow U = -GM/r (negative); ``*_los`` are velocity components
    along the link direction, ``*_sq`` full squared speeds.
    """

    ell: float
    u_g: float = 0.0
    u_s: float = 0.0
    v_g_sq: float = 0.0
    v_s_sq: float = 0.0
    v_g_los: float = 0.0
    v_s_los: float = 0.0
    delta_ell: float = 0.0
    tau_c: float = 0.0

    def __post_init__(self) -> None:
        if not self.ell > 0:
            raise DomainError("delay length must be positive")
        if not abs(self.delta_ell) < 1e-3 * self.ell:
            raise DomainError("delay-line mismatch must be small compared with the delay")
        if self.v_g_sq < 0 or self.v_s_sq < 0:
            raise DomainError("squared speeds must be non-negative")
        if max(abs(self.v_g_los), abs(self.v_s_los)) >= C:
            raise DomainError("line-of-sight speeds must be subluminal")


def point_mass_potential(r: float, mass: float = CONST.M_earth) -> float:
    if not r > 0:
        raise DomainError("distance must be positive")
    return -G * mass / r


def gateway_geometry(ell: float, moon_distance: Optional[float] = None,
                     v_g_los: float = 0.0, v_s_los: float = 0.0) -> HomGeometry:
    """Equatorial ground station linked to a platform orbiting with the Moon.

    The platform sits at the mean Earth-Moon distance and moves at the Moon's
    orbital speed.  Pass ``moon_distance`` (from the lunar centre) to add the
    Moon's potential at the platform.
    """
    d = CONST.d_earth_moon
    u_s = point_mass_potential(d)
    if moon_distance is not None:
        u_s += point_mass_potential(moon_distance, CONST.M_moon)
    return HomGeometry(
        ell=ell,
        u_g=point_mass_potential(CONST.R_earth),
        u_s=u_s,
        v_g_sq=(CONST.Omega_earth * CONST.R_earth) ** 2,
        v_s_sq=(CONST.Omega_moon * d) ** 2,
        v_g_los=v_g_los,
        v_s_los=v_s_los,
    )


def hom_dip_degenerate(tau, sigma: float):
    if not sigma > 0:
        raise DomainError("bandwidth must be positive")
    return -0.5 * np.expm1(-2.0 * sigma**2 * np.asarray(tau, dtype=float) ** 2)


def hom_entangled(tau, sigma: float, domega: float):
    if not sigma > 0:
        raise DomainError("bandwidth must be positive")
    tau = np.asarray(tau, dtype=float)
    return 0.5 * (1.0 - np.cos(domega * tau) * np.exp(-2.0 * sigma**2 * tau**2))


def noisy_coincidence(tau, sigma: float, domega: float, p: float):
    if not 0.0 <= p <= 1.0:
        raise DomainError("quality factor must lie in [0, 1]")
    return p * hom_entangled(tau, sigma, domega) + 0.5 * (1.0 - p)


def quality_factor_hom(noise_rate: float, dt_r: float, F: float) -> float:
    """(1 - N*dt)^2 * F: either detector of the pair may fire on noise."""
    single = effective_purity(1.0, noise_rate, dt_r)
    return single * single * F


def _rate_ratio(geo: HomGeometry) -> float:
    return (1.0 + 0.5 * (geo.v_s_sq - geo.v_g_sq) / C**2 - (geo.u_s - geo.u_g) / C**2)


def _doppler_ratio(geo: HomGeometry) -> float:
    return (1.0 + geo.v_s_los / C) / (1.0 + geo.v_g_los / C)


def relativistic_time_shift(geo: HomGeometry) -> float:
    """Arm-to-arm delay from Doppler, time dilation and redshift (no mismatch or control)."""
    return geo.ell / C * (_doppler_ratio(geo) * _rate_ratio(geo) - 1.0)


def tau_gr(geo: HomGeometry) -> float:
    """The relativistic part alone: time dilation plus gravitational redshift."""
    return geo.ell / C * (_rate_ratio(geo) - 1.0)


def total_time_shift(geo: HomGeometry) -> float:
    doppler = geo.ell / C * (_doppler_ratio(geo) - 1.0)
    return tau_gr(geo) + geo.delta_ell / C + geo.tau_c + doppler


def hom_phase_shift(domega: float, tau_rel: float) -> float:
    return domega * tau_rel


def timing_error(tau, sigma: float, domega: float, p: float):
    """Per-coincidence error on the delay (divide by sqrt(N_c)).

    Infinite where the coincidence curve is flat, e.g. at ``tau = 0``.
    """
    tau = np.asarray(tau, dtype=float)
    s2 = sigma**2
    x = -2.0 * s2 * tau**2
    arg = domega * tau
    one_minus_a = (1.0 - p) - p * np.expm1(x)
    a = p * np.exp(x)
    num = np.sqrt(np.sin(arg) ** 2 + np.cos(arg) ** 2 * one_minus_a * (1.0 + a))
    den = a * np.abs(4.0 * tau * s2 * np.cos(arg) + domega * np.sin(arg))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / den, np.inf)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TimingOptimum:
    tau_opt: float
    dtau_opt: float


def optimal_timing_error(sigma: float, domega: float, p: float) -> TimingOptimum:
    if not sigma > 0 or domega < 0 or not 0.0 < p <= 1.0:
        raise DomainError("need sigma > 0, domega >= 0 and p in (0, 1]")
    hi = 6.0 / sigma
    n_grid = 1024
    if domega > 0:
        hi = max(hi, 4.0 * math.pi / domega)
        # at least 32 samples per beat period so the first fringe is resolved
        n_grid = max(n_grid, min(400_000, math.ceil(32 * hi * domega / (2 * math.pi))))
    x, fx = grid_golden_minimize(lambda t: timing_error(t, sigma, domega, p),
                                 0.0, hi, n_grid=n_grid, vectorized=True)
    return TimingOptimum(float(x), float(fx))


def alpha_error_hom(dtau: float, ell: float, delta_u: float, n_c: float) -> float:
    if delta_u == 0:
        raise InfeasibleError("no potential difference: alpha is unconstrained")
    if not n_c > 0:
        raise DomainError("need a positive number of coincidences")
    return abs(dtau / (ell / C * (delta_u / C**2) * math.sqrt(n_c)))


Mode = Literal["degenerate", "nondegenerate"]


@dataclass(frozen=True)
class HomScenario:
    """Ground-to-orbit HOM link; the degenerate mode sends both photons at ``lambda1``."""

    source: SourceSpec
    tx: OpticalTerminal
    rx: OpticalTerminal
    ell: float = 1000.0
    lambda1: float = 780e-9
    lambda2: float = 1550e-9
    losses: LossFactors = LossFactors()
    noise: NoiseEnvironment = NoiseEnvironment()
    dt_r: float = 1e-9
    # frequency split override; by default derived from the two wavelengths
    domega: Optional[float] = None
    sigma_unit: Literal["rad/s", "Hz"] = "rad/s"
    sigma_cap: float = SIGMA_CAP
    theta_m: float = math.radians(20.0)
    body: Body = EARTH

    def __post_init__(self) -> None:
        if self.sigma_unit not in ("rad/s", "Hz"):
            raise DomainError(f"unknown sigma unit {self.sigma_unit!r}")
        if not (self.lambda1 > 0 and self.lambda2 > 0 and self.ell > 0):
            raise DomainError("wavelengths and delay length must be positive")

    def sigma_rad_s(self, sigma: float) -> float:
        return sigma * 2.0 * math.pi if self.sigma_unit == "Hz" else sigma

    def split(self, mode: Mode) -> float:
        if mode == "degenerate":
            return 0.0
        if self.domega is not None:
            return self.domega
        return angular_frequency_split(self.lambda1, self.lambda2)

    def wavelengths(self, mode: Mode) -> tuple[float, float]:
        return (self.lambda1, self.lambda1) if mode == "degenerate" else (self.lambda1, self.lambda2)

    def quality(self, sigma: float) -> float:
        """Quality factor with the filter matched to the photon bandwidth.

        The filter passes the full width 2*sigma rad/s, i.e. sigma/pi Hz.
        """
        env = replace(self.noise, bandwidth=sigma / math.pi)
        return quality_factor_hom(noise_rate(env), self.dt_r, self.source.fidelity)


def potential_difference(h: float, body: Body = EARTH) -> float:
    """U(spacecraft) - U(ground) for a point-mass body, positive upward."""
    return body.gm * (1.0 / body.radius - 1.0 / (body.radius + h))


@dataclass(frozen=True)
class HomScanResult:
    mode: str
    sigma: np.ndarray
    altitude: np.ndarray
    quality: np.ndarray
    dtau_opt: np.ndarray
    n_coincidences: np.ndarray
    delta_alpha: np.ndarray = field(repr=False)  # shape (len(sigma), len(altitude))

    @property
    def argmin(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmin(self.delta_alpha)), self.delta_alpha.shape)
        return float(self.sigma[i]), float(self.altitude[j])

    @property
    def min_delta_alpha(self) -> float:
        return float(np.min(self.delta_alpha))

    def long_table(self) -> dict:
        s, h = np.meshgrid(self.sigma, self.altitude, indexing="ij")
        return {
            "sigma_rad_s": s.ravel(),
            "altitude_km": h.ravel() / 1e3,
            "delta_alpha": self.delta_alpha.ravel(),
        }


def pair_counts(h: float, sc: HomScenario, mode: Mode) -> float:
    """Coincidences per pass at altitude ``h`` (zenith range); 0 if no pass."""
    try:
        T = integration_time(PassGeometry(sc.body.radius + h, sc.theta_m, sc.body))
    except SuperSynchronousError:
        return 0.0
    l1, l2 = sc.wavelengths(mode)
    eta1 = link_efficiency(sc.tx, sc.rx, h, l1, sc.losses)
    eta2 = link_efficiency(sc.tx, sc.rx, h, l2, sc.losses)
    return entangled_pair_rate(sc.source, eta1, eta2) * T


def hom_alpha_scan(sigmas: Sequence[float], altitudes: Sequence[float], mode: Mode,
                   scenario: HomScenario, enforce_cap: bool = True) -> HomScanResult:
    """Alpha error after one pass over a (bandwidth, altitude) grid.

    Cells where noise saturates the timing window or no pass exists read inf.
    """
    if mode not in ("degenerate", "nondegenerate"):
        raise DomainError(f"unknown mode {mode!r}")
    sig_in = np.asarray(sigmas, dtype=float)
    h = np.asarray(altitudes, dtype=float)
    if sig_in.size == 0 or h.size == 0 or np.any(sig_in <= 0) or np.any(h <= 0):
        raise DomainError("bandwidths and altitudes must be non-empty and positive")
    sig = np.array([scenario.sigma_rad_s(s) for s in sig_in])
    if enforce_cap and np.any(sig > scenario.sigma_cap * (1 + 1e-12)):
        raise DomainError(f"bandwidth above the {scenario.sigma_cap:.3g} rad/s cap")
    domega = scenario.split(mode)
    quality = np.empty(sig.size)
    dtau = np.empty(sig.size)
    for i, s in enumerate(sig):
        try:
            quality[i] = scenario.quality(s)
        except NoiseSaturationError:
            quality[i] = 0.0
        dtau[i] = (optimal_timing_error(s, domega, quality[i]).dtau_opt
                   if quality[i] > 0 else math.inf)
    n_c = np.array([pair_counts(float(x), scenario, mode) for x in h])
    du = np.array([potential_difference(float(x), scenario.body) for x in h])
    with np.errstate(divide="ignore"):
        scale = scenario.ell / C * du / C**2 * np.sqrt(n_c)
        grid = dtau[:, None] / np.where(scale > 0, scale, 0.0)[None, :]
    grid = np.where(np.isfinite(grid), grid, np.inf)
    return HomScanResult(mode, sig_in, h, quality, dtau, n_c, grid)


def hom_alpha_ratio(sigmas: Sequence[float], altitudes: Sequence[float],
                    scenario: HomScenario) -> np.ndarray:
    """Degenerate over non-degenerate alpha error, cell by cell."""
    deg = hom_alpha_scan(sigmas, altitudes, "degenerate", scenario)
    nondeg = hom_alpha_scan(sigmas, altitudes, "nondegenerate", scenario)
    with np.errstate(invalid="ignore"):
        return deg.delta_alpha / nondeg.delta_alpha
