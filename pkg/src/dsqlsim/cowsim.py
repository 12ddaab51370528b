"""Single-photon gravitational phase (optical COW) experiment model.

A photon crosses two unbalanced Mach-Zehnder interferometers held at
different heights.  The gravitational redshift between them shows up as a
phase ``phi_gr`` on the long arm.  Fringe visibility is limited by photon
bandwidth and by the fraction ``p`` of detections that are genuine signal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .bellstats import effective_purity
from .constants import CONST, C, wavelength_to_angular_frequency
from .errors import DomainError, SuperSynchronousError
from .linkbudget import (LossFactors, OpticalTerminal, SourceSpec, link_efficiency,
                         single_photon_rate)
from .optimize import grid_golden_minimize
from .relorbit import EARTH, Body, PassGeometry, integration_time

GModel = Literal["uniform", "altitude"]


@dataclass(frozen=True)
class CowInterferometer:
    wavelength: float
    h: float
    ell: float
    g: float = CONST.g0
    theta: float = 0.0
    alpha: float = 0.0
    # optical path multiplier for a fibre delay line
    refractive_index: float = 1.0

    def __post_init__(self) -> None:
        if not (self.wavelength > 0 and self.ell > 0):
            raise DomainError("wavelength and delay length must be positive")
        if self.h < 0:
            raise DomainError("altitude difference must be non-negative")
        if not self.refractive_index >= 1.0:
            raise DomainError("refractive index must be >= 1")

    @property
    def omega0(self) -> float:
        return wavelength_to_angular_frequency(self.wavelength)

    @property
    def optical_length(self) -> float:
        return self.refractive_index * self.ell


@dataclass(frozen=True)
class CowSignalModel:
    sigma: float
    p: float
    fidelity: float = 0.95
    dt_r: float = 1e-9

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise DomainError("photon bandwidth must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"quality factor must lie in [0, 1], got {self.p}")

    @classmethod
    def from_noise(cls, sigma: float, noise_rate: float, fidelity: float = 0.95,
                   dt_r: float = 1e-9) -> "CowSignalModel":
        return cls(sigma, quality_factor(noise_rate, dt_r, fidelity), fidelity, dt_r)


def gravity_at_altitude(h: float, body: Body = EARTH) -> float:
    return body.gm / (body.radius + h) ** 2


def gravitational_phase(ifo: CowInterferometer) -> float:
    return ((1.0 + ifo.alpha) * 2.0 * math.pi / ifo.wavelength
            * ifo.g * ifo.h * ifo.optical_length / C**2)


def doppler_phase(wavelength: float, ell: float, v: float) -> float:
    """First-order Doppler phase on the delay line; sign follows ``v``."""
    if not (wavelength > 0 and ell > 0):
        raise DomainError("wavelength and delay length must be positive")
    return 2.0 * math.pi / wavelength * ell * v / C


def detection_probability(phi, model: CowSignalModel, ifo: CowInterferometer):
    phi = np.asarray(phi, dtype=float)
    tau = phi / ifo.omega0
    vis = np.exp(-2.0 * model.sigma**2 * tau**2)
    out = 0.5 * model.p * (1.0 - vis * np.cos(phi)) + 0.5 * (1.0 - model.p)
    return out if out.ndim else float(out)


def _one_minus_a2cos2(p, log_env, arg):
    """1 - (p e^x cos)^2 written as sin^2 + cos^2 (1-a)(1+a) to avoid cancellation."""
    one_minus_a = (1.0 - p) - p * np.expm1(log_env)
    a = p * np.exp(log_env)
    return np.sin(arg) ** 2 + np.cos(arg) ** 2 * one_minus_a * (1.0 + a)


def phase_error_raw(phi, model: CowSignalModel, ifo: CowInterferometer):
    """Per-event estimator exactly as published.

    The second derivative term carries a factor ``omega0``, so the value is in
    units of 1/omega0; see ``phase_error`` for the radian-valued version.
    """
    phi = np.asarray(phi, dtype=float)
    w0, s2, p = ifo.omega0, model.sigma**2, model.p
    x = -2.0 * s2 * phi**2 / w0**2
    env = np.exp(x)
    num = np.sqrt(_one_minus_a2cos2(p, x, phi))
    den = p * env * np.abs(4.0 * (phi**2 / w0**2) * s2 * np.cos(phi) + w0 * np.sin(phi))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / den, np.inf)
    return out if out.ndim else float(out)


def phase_error(phi, model: CowSignalModel, ifo: CowInterferometer):
    """Per-event phase error in radians (divide by sqrt(N) for N events).

    Infinite at fringe extrema, where the fringe slope vanishes.
    """
    raw = phase_error_raw(phi, model, ifo)
    return raw * ifo.omega0


@dataclass(frozen=True)
class PhaseOptimum:
    phi_opt: float
    dphi_opt: float


def optimal_phase_error(model: CowSignalModel, ifo: CowInterferometer) -> PhaseOptimum:
    x, fx = grid_golden_minimize(lambda phi: phase_error(phi, model, ifo),
                                 0.0, 2.0 * math.pi, n_grid=1024, vectorized=True)
    return PhaseOptimum(float(x), float(fx))


def quality_factor(noise_rate: float, dt_r: float, F: float) -> float:
    return effective_purity(F, noise_rate, dt_r)


def alpha_error(dphi: float, phi_gr: float, n_events: float) -> float:
    """First-order propagation of the phase error onto alpha."""
    if not n_events > 0:
        return math.inf
    if phi_gr == 0:
        raise DomainError("alpha is unconstrained without a gravitational phase")
    return dphi / (abs(phi_gr) * math.sqrt(n_events))


@dataclass(frozen=True)
class CowScenario:
    source: SourceSpec
    tx: OpticalTerminal
    rx: OpticalTerminal
    signal: CowSignalModel
    wavelength: float = 1550e-9
    ell: float = 6000.0
    losses: LossFactors = LossFactors()
    fiber_loss_db_per_km: float = 0.0
    refractive_index: float = 1.0
    g_model: GModel = "uniform"
    g: float = CONST.g0
    theta_m: float = math.radians(20.0)
    body: Body = EARTH

    def __post_init__(self) -> None:
        if self.g_model not in ("uniform", "altitude"):
            raise DomainError(f"unknown g_model {self.g_model!r}")
        if self.fiber_loss_db_per_km < 0:
            raise DomainError("fibre loss must be non-negative")

    @property
    def fiber_efficiency(self) -> float:
        return 10.0 ** (-self.fiber_loss_db_per_km * self.ell / 1e3 / 10.0)

    def interferometer(self, h: float) -> CowInterferometer:
        g = gravity_at_altitude(h, self.body) if self.g_model == "altitude" else self.g
        return CowInterferometer(self.wavelength, h, self.ell, g,
                                 refractive_index=self.refractive_index)


@dataclass(frozen=True)
class CowScanResult:
    altitude: np.ndarray
    n_events: np.ndarray
    phi_gr: np.ndarray
    dphi_opt: np.ndarray
    delta_alpha: np.ndarray
    empty_pass: np.ndarray = field(repr=False)

    @property
    def argmin_altitude(self) -> float:
        return float(self.altitude[int(np.argmin(self.delta_alpha))])

    @property
    def min_delta_alpha(self) -> float:
        return float(np.min(self.delta_alpha))

    def columns(self) -> dict:
        return {
            "altitude_km": self.altitude / 1e3,
            "N": self.n_events,
            "phi_gr_rad": self.phi_gr,
            "dphi_opt_rad": self.dphi_opt,
            "delta_alpha": self.delta_alpha,
        }


def cow_cell(h: float, sc: CowScenario) -> tuple[float, float, float, float]:
    """(N, phi_gr, dphi_opt, delta_alpha) for one altitude; N = 0 when no pass."""
    ifo = sc.interferometer(h)
    phi_gr = gravitational_phase(ifo)
    dphi = optimal_phase_error(sc.signal, ifo).dphi_opt
    try:
        T = integration_time(PassGeometry(sc.body.radius + h, sc.theta_m, sc.body))
    except SuperSynchronousError:
        return 0.0, phi_gr, dphi, math.inf
    eta = link_efficiency(sc.tx, sc.rx, h, sc.wavelength, sc.losses) * sc.fiber_efficiency
    n = single_photon_rate(sc.source, eta) * T
    return n, phi_gr, dphi, alpha_error(dphi, phi_gr, n)


def alpha_error_scan(altitudes: Sequence[float], scenario: CowScenario) -> CowScanResult:
    """Alpha error after one pass, per circular-orbit altitude (zenith range)."""
    h = np.asarray(altitudes, dtype=float)
    if h.ndim != 1 or h.size == 0 or np.any(h <= 0):
        raise DomainError("altitudes must be a non-empty list of positive values")
    cells = np.array([cow_cell(float(x), scenario) for x in h])
    n, phi, dphi, da = cells.T
    return CowScanResult(h, n, phi, dphi, da, ~(n > 0))
