"""Free-space optical channel efficiency, delivered photon rates and noise rates.

The link efficiency couples a Gaussian mode through two circular apertures.
Range and wavelength are in metres, rates in counts per second.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError, InfeasibleError


class FarFieldWarning(UserWarning):
    """Far-field approximation used inside the near-field region."""


@dataclass(frozen=True)
class OpticalTerminal:
    aperture: float
    m_squared: float = 1.0

    def __post_init__(self) -> None:
        if not self.aperture > 0:
            raise DomainError("aperture diameter must be positive")
        if not self.m_squared >= 1.0:
            raise DomainError("beam quality M^2 must be >= 1")


@dataclass(frozen=True)
class LossFactors:
    eta_rx: float = 1.0
    eta_d: float = 1.0
    eta_tx: float = 1.0
    eta_atm: float = 1.0
    eta_margin: float = 1.0

    def __post_init__(self) -> None:
        for name, v in vars(self).items():
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")

    @classmethod
    def lumped(cls, eta_x: float) -> "LossFactors":
        """All extra losses folded into a single factor."""
        return cls(eta_margin=eta_x)

    @classmethod
    def from_db(cls, db: float) -> "LossFactors":
        return cls(eta_margin=10.0 ** (-db / 10.0))


@dataclass(frozen=True)
class SourceSpec:
    f_clock: float
    p1: float = 1.0
    fidelity: float = 1.0

    def __post_init__(self) -> None:
        if not self.f_clock > 0:
            raise DomainError("clock rate must be positive")
        if not 0.0 <= self.p1 <= 1.0:
            raise DomainError("pair probability must lie in [0, 1]")
        if not 0.0 <= self.fidelity <= 1.0:
            raise DomainError("fidelity must lie in [0, 1]")


@dataclass(frozen=True)
class NoiseEnvironment:
    radiance_w: float = 0.0
    fov: float = 0.0
    collection_area: float = 0.0
    bandwidth: float = 0.0
    source_excess: float = 0.0
    dark_rate: float = 0.0
    eta_rx: float = 1.0

    def __post_init__(self) -> None:
        for name, v in vars(self).items():
            if v < 0:
                raise DomainError(f"{name} must be non-negative, got {v}")


def aggregate_losses(f: LossFactors) -> float:
    return f.eta_rx * f.eta_d * f.eta_tx * f.eta_atm * f.eta_margin


def link_efficiency(tx: OpticalTerminal, rx: OpticalTerminal, range_: float,
                    wavelength: float, losses: LossFactors = LossFactors()) -> float:
    """One-way efficiency including the near-field saturation.

    The exponent tends to 2 D_rx^2/D_tx^2 at short range and to the
    far-field area ratio D_rx^2 D_tx^2 / (M^2 lambda R)^2 at long range.
    """
    if not range_ > 0 or not wavelength > 0:
        raise DomainError("range and wavelength must be positive")
    dt2, dr2 = tx.aperture**2, rx.aperture**2
    num = 2.0 * dt2 * dr2
    den = dt2**2 + 2.0 * (tx.m_squared * range_ * wavelength) ** 2
    return aggregate_losses(losses) * -math.expm1(-num / den)


def far_field_valid(range_: float, d_tx: float, wavelength: float) -> bool:
    """True when the range is at least ten Rayleigh-like lengths pi*D^2/lambda."""
    return range_ >= 10.0 * math.pi * d_tx**2 / wavelength


def near_field_range(tx: OpticalTerminal, rx: OpticalTerminal, wavelength: float) -> float:
    """Range scale max(D_tx^2, D_tx D_rx) / (M^2 lambda) below which the far-field formula fails.

    Beyond k times this range both corrections to the far-field ratio (the
    D_tx^4 term in the denominator and the curvature of 1 - exp) are below 1/k^2.
    """
    if not wavelength > 0:
        raise DomainError("wavelength must be positive")
    d = tx.aperture * max(tx.aperture, rx.aperture)
    return d / (tx.m_squared * wavelength)


def link_efficiency_far_field(tx: OpticalTerminal, rx: OpticalTerminal, range_: float,
                              wavelength: float, losses: LossFactors = LossFactors(),
                              warn: bool = True) -> float:
    """Aperture-to-spot-area ratio; emits ``FarFieldWarning`` in the near field."""
    if not range_ > 0 or not wavelength > 0:
        raise DomainError("range and wavelength must be positive")
    if warn and not far_field_valid(range_, tx.aperture, wavelength):
        warnings.warn(f"far-field formula used at R={range_:.3g} m", FarFieldWarning,
                      stacklevel=2)
    spot = tx.m_squared * (wavelength / tx.aperture) * range_
    return aggregate_losses(losses) * rx.aperture**2 / spot**2


def _check_eta(*etas: float) -> None:
    for eta in etas:
        if not 0.0 <= eta <= 1.0:
            raise DomainError(f"efficiency must lie in [0, 1], got {eta}")


def single_photon_rate(src: SourceSpec, eta: float) -> float:
    _check_eta(eta)
    return src.f_clock * eta


def entangled_one_channel_rate(src: SourceSpec, eta: float) -> float:
    _check_eta(eta)
    return src.f_clock * src.p1 * eta


def entangled_pair_rate(src: SourceSpec, eta1: float, eta2: float) -> float:
    _check_eta(eta1, eta2)
    return src.f_clock * src.p1 * eta1 * eta2


def noise_rate(env: NoiseEnvironment) -> float:
    """Background + source-excess counts after the receiver, plus dark counts."""
    sky = env.radiance_w * env.collection_area * env.fov**2 / 4.0 * env.bandwidth
    return env.eta_rx * (sky + env.source_excess) + env.dark_rate


def max_noise_for_purity(fidelity: float, p_target: float, dt_r: float,
                         squared: bool = False) -> float:
    """Largest noise rate keeping the quality factor at ``p_target``.

    Inverts p = (1 - N*dt)^k * F with k = 2 when ``squared`` (coincidence
    experiments where either detector may fire on noise), else k = 1.
    """
    if not dt_r > 0:
        raise DomainError("timing window must be positive")
    if not 0.0 < p_target <= 1.0 or not 0.0 < fidelity <= 1.0:
        raise DomainError("purity and fidelity must lie in (0, 1]")
    if p_target > fidelity:
        raise InfeasibleError(
            f"target purity {p_target} exceeds source fidelity {fidelity}")
    k = 2 if squared else 1
    return (1.0 - (p_target / fidelity) ** (1.0 / k)) / dt_r
