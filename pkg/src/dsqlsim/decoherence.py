"""Closed-form estimates for gravitational decoherence models.

Two families are covered: energy-basis decoherence driven by a stochastic
metric with correlation time ``tau`` (ABH), and position-basis collapse with a
mass-density cutoff ``ell_cut`` (Diosi-Penrose).  All results are order-of-
magnitude rates or squared phase spreads; no master equations are solved.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .constants import CONST, C, G, HBAR
from .errors import DomainError

ELL_CUT_FLOOR = 0.5e-10  # m


def _nonneg(**kw: float) -> None:
    for name, v in kw.items():
        if v < 0:
            raise DomainError(f"{name} must be non-negative, got {v}")


def _pos(**kw: float) -> None:
    for name, v in kw.items():
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class MassiveSystem:
    m: float
    R: float
    v: float
    L: float

    def __post_init__(self) -> None:
        _nonneg(m=self.m, R=self.R, v=self.v, L=self.L)

    @classmethod
    def from_amu(cls, mass_amu: float, R: float, v: float, L: float) -> "MassiveSystem":
        return cls(mass_amu * CONST.amu, R, v, L)


@dataclass(frozen=True)
class ModelParams:
    tau: float = CONST.tau_P
    theta: Optional[float] = None
    ell_cut: float = ELL_CUT_FLOOR
    lambda_diff: float = 0.0

    def __post_init__(self) -> None:
        _nonneg(tau=self.tau, lambda_diff=self.lambda_diff)
        if self.ell_cut < ELL_CUT_FLOOR:
            raise DomainError(f"cutoff below the {ELL_CUT_FLOOR} m experimental bound")
        if self.theta is not None:
            _nonneg(theta=self.theta)
            object.__setattr__(self, "tau", abh_tau_from_theta(self.theta))


def gamma_abh(delta_e: float, tau: float) -> float:
    _nonneg(delta_e=delta_e, tau=tau)
    return delta_e**2 * tau / HBAR**2


def energy_spread_for_rate(gamma: float, tau: float = CONST.tau_P) -> float:
    """Energy spread at which the ABH rate reaches ``gamma``."""
    _nonneg(gamma=gamma)
    _pos(tau=tau)
    return HBAR * math.sqrt(gamma / tau)


def abh_tau_from_theta(theta: float) -> float:
    _nonneg(theta=theta)
    return 32.0 * math.pi / 9.0 * CONST.tau_P * theta / CONST.T_P


def theta_from_tau(tau: float) -> float:
    _nonneg(tau=tau)
    return tau * 9.0 * CONST.T_P / (32.0 * math.pi * CONST.tau_P)


def gamma_dp(sys: MassiveSystem, ell_cut: float = ELL_CUT_FLOOR) -> float:
    _nonneg(ell_cut=ell_cut)
    d = math.hypot(sys.R, ell_cut)
    if not d > 0:
        raise DomainError("radius and cutoff cannot both vanish")
    return G * sys.m**2 / (HBAR * d)


def abh_dephasing(sys: MassiveSystem, tau: float) -> float:
    """Squared phase spread m^2 v^3 tau L / hbar^2 accumulated over the path."""
    _nonneg(tau=tau)
    return sys.m**2 * sys.v**3 * tau * sys.L / HBAR**2


def theta_for_dephasing(sys: MassiveSystem, target: float = 1.0) -> float:
    """Noise temperature (K) at which ABH dephasing reaches ``target``."""
    _pos(target=target)
    scale = sys.m**2 * sys.v**3 * sys.L
    if not scale > 0:
        raise DomainError("mass, velocity and path length must be positive")
    return theta_from_tau(target * HBAR**2 / scale)


def dp_dephasing(sys: MassiveSystem) -> float:
    """Squared phase spread G m^2 L / (hbar R v); grows as the particle slows."""
    _pos(R=sys.R, v=sys.v)
    return G * sys.m**2 * sys.L / (HBAR * sys.R * sys.v)


def mass_for_dp_dephasing(R: float, v: float, L: float, target: float = 1.0) -> float:
    """Mass (kg) at which DP dephasing reaches ``target``."""
    _pos(R=R, v=v, L=L, target=target)
    return math.sqrt(target * HBAR * R * v / (G * L))


def wavepacket_spread(sigma_s_sq: float, lambda_diff: float, m: float, t: float) -> float:
    _pos(m=m)
    _nonneg(sigma_s_sq=sigma_s_sq, lambda_diff=lambda_diff, t=t)
    return sigma_s_sq + lambda_diff * t**3 / (2.0 * m**2)


def spread_crossover_time(sigma_s_sq: float, lambda_diff: float, m: float) -> float:
    """Time at which the diffusive term equals the Schroedinger spread."""
    _pos(m=m, lambda_diff=lambda_diff)
    _nonneg(sigma_s_sq=sigma_s_sq)
    return (2.0 * m**2 * sigma_s_sq / lambda_diff) ** (1.0 / 3.0)


def photon_visibility_loss(theta: float, energy: float, L: float) -> float:
    """Squared phase spread for a photon of ``energy`` (J) over ``L``; Theta enters as k_B*Theta."""
    _nonneg(theta=theta, energy=energy, L=L)
    return 8.0 * G * CONST.k_B * theta * energy**2 * L / (HBAR**2 * C**6)


def photons_for_visibility(delta_phi: float) -> float:
    """Mean photon number needed to resolve a phase loss ``delta_phi``."""
    _pos(delta_phi=delta_phi)
    return 1.0 / delta_phi**2


@dataclass(frozen=True)
class DecoherenceReport:
    gamma_dp: float
    gamma_abh: Optional[float]
    abh_dephasing: float
    dp_dephasing: Optional[float]
    tau: float
    theta_for_unit_abh_dephasing: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


def decoherence_report(sys: MassiveSystem, params: ModelParams = ModelParams(),
                       delta_e: Optional[float] = None) -> DecoherenceReport:
    """All closed-form figures for one system; undefined entries are None."""
    moving = sys.m**2 * sys.v**3 * sys.L > 0  # product can underflow for tiny inputs
    return DecoherenceReport(
        gamma_dp=gamma_dp(sys, params.ell_cut),
        gamma_abh=None if delta_e is None else gamma_abh(delta_e, params.tau),
        abh_dephasing=abh_dephasing(sys, params.tau),
        dp_dephasing=dp_dephasing(sys) if sys.R > 0 and sys.v > 0 else None,
        tau=params.tau,
        theta_for_unit_abh_dephasing=theta_for_dephasing(sys) if moving else None,
    )
