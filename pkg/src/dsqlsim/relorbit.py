"""Orbital geometry, relativistic clock-rate offsets and timing geometry.

Clock offsets are expressed as dimensionless fractional rates relative to
asymptotic coordinate time.  An observatory on the rotating surface of a body
runs slow by ``epsilon_observatory``; a satellite runs slow by
``epsilon_satellite``.  Their difference is the relative tick rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .constants import CONST, C, G, schwarzschild_radius
from .errors import DomainError, SuperSynchronousError


@dataclass(frozen=True)
class Body:
    """A gravitating, rotating sphere."""

    mass: float
    radius: float
    rotation_rate: float = 0.0
    name: str = ""

    def __post_init__(self) -> None:
        if not (self.mass > 0 and self.radius > 0):
            raise DomainError("body mass and radius must be positive")
        if self.rotation_rate < 0:
            raise DomainError("rotation rate must be non-negative")

    @property
    def surface_speed(self) -> float:
        return self.rotation_rate * self.radius

    @property
    def gm(self) -> float:
        return G * self.mass

    @property
    def schwarzschild_radius(self) -> float:
        return schwarzschild_radius(self.mass)


EARTH = Body(CONST.M_earth, CONST.R_earth, CONST.Omega_earth, "earth")
MOON = Body(CONST.M_moon, CONST.R_moon, CONST.Omega_moon, "moon")


@dataclass(frozen=True)
class OrbitSpec:
    """Instantaneous position on a Keplerian orbit.

    ``r`` is the radial distance from the body centre and ``a`` the
    semi-major axis.  For circular orbits ``a`` defaults to ``r``.
    """

    kind: Literal["circular", "elliptic"]
    r: float
    a: Optional[float] = None
    eccentricity: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("circular", "elliptic"):
            raise DomainError(f"unknown orbit kind {self.kind!r}")
        if self.a is None:
            object.__setattr__(self, "a", self.r)
        if self.kind == "circular" and (self.a != self.r or self.eccentricity != 0):
            raise DomainError("circular orbit requires a == r and e == 0")
        if not 0.0 <= self.eccentricity < 1.0:
            raise DomainError(f"eccentricity must lie in [0, 1), got {self.eccentricity}")
        if not self.r > 0:
            raise DomainError("radial distance must be positive")
        lo = self.a * (1 - self.eccentricity)
        hi = self.a * (1 + self.eccentricity)
        if not lo * (1 - 1e-12) <= self.r <= hi * (1 + 1e-12):
            raise DomainError(f"r={self.r} outside [{lo}, {hi}] for this orbit")

    @classmethod
    def circular(cls, r: float) -> "OrbitSpec":
        return cls("circular", r)

    @property
    def perigee(self) -> float:
        return self.a * (1 - self.eccentricity)

    @property
    def apogee(self) -> float:
        return self.a * (1 + self.eccentricity)


@dataclass(frozen=True)
class PassGeometry:
    """Circular orbit seen from one ground station above ``theta_m`` elevation."""

    a: float
    theta_m: float = math.radians(20.0)
    body: Body = EARTH

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta_m < math.pi / 2 + 1e-15:
            raise DomainError("minimum elevation must lie in [0, pi/2]")
        if not self.a > self.body.radius:
            raise DomainError("orbit radius must exceed body radius")

    @classmethod
    def from_altitude(cls, altitude: float, theta_m: float = math.radians(20.0),
                      body: Body = EARTH) -> "PassGeometry":
        return cls(body.radius + altitude, theta_m, body)

    @property
    def altitude(self) -> float:
        return self.a - self.body.radius


@dataclass(frozen=True)
class HumanBellTiming:
    t_question: float
    t_choice: float
    t_transmit: float
    source_distance: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.t_choice > 0:
            raise DomainError("human reaction interval must be positive")
        if not self.t_question + self.t_choice <= self.t_transmit:
            raise DomainError("cache deadline must follow the end of the choice interval")


def _check_outside(r: float, body: Body) -> None:
    if not r > body.radius:
        raise DomainError(f"r={r} m lies inside the body (radius {body.radius} m)")


def epsilon_observatory(body: Body = EARTH) -> float:
    """Fractional slow-down of a clock on the rotating equator of ``body``."""
    rs = body.schwarzschild_radius
    return 0.5 * (rs / body.radius + (body.surface_speed / C) ** 2)


def epsilon_satellite_circular(r: float, body: Body = EARTH) -> float:
    _check_outside(r, body)
    return 0.75 * body.schwarzschild_radius / r


def epsilon_satellite_elliptic(r: float, a: float, body: Body = EARTH) -> float:
    """Combined gravitational + velocity offset anywhere on an elliptic orbit."""
    _check_outside(r, body)
    if not a > 0 or not r < 2 * a:
        raise DomainError(f"r={r} is not reachable on an orbit with a={a}")
    return body.schwarzschild_radius * (1.0 / r - 1.0 / (4.0 * a))


def velocity_squared_elliptic(r: float, a: float, body: Body = EARTH) -> float:
    """Vis-viva speed squared, m^2/s^2."""
    _check_outside(r, body)
    v2 = body.gm * (2.0 / r - 1.0 / a)
    if not v2 > 0:
        raise DomainError(f"unbound or degenerate orbit (v^2={v2})")
    return v2


def clock_rate_ratio(observatory: Body, sat: OrbitSpec) -> float:
    """dt_satellite / dt_observatory; the observatory body is also the central body."""
    return 1.0 + epsilon_observatory(observatory) - epsilon_satellite_elliptic(
        sat.r, sat.a, observatory)


def cancellation_radius(body: Body = EARTH) -> float:
    """Circular-orbit radius where satellite and observatory clocks tick alike."""
    eps = epsilon_observatory(body)
    if not eps > 0:
        raise DomainError("observatory offset must be positive")
    return 0.75 * body.schwarzschild_radius / eps


def doppler_fraction(v_radial: float) -> float:
    """First-order Doppler magnitude |v|/c."""
    return abs(doppler_fraction_signed(v_radial))


def doppler_fraction_signed(v_radial: float) -> float:
    """v/c, positive for a receding source."""
    if not abs(v_radial) < C:
        raise DomainError("radial speed must be subluminal")
    return v_radial / C


@dataclass(frozen=True)
class EpsilonProfile:
    true_anomaly: np.ndarray
    radius: np.ndarray
    eps_satellite: np.ndarray
    eps_observatory: float
    # eps_observatory - eps_satellite: positive when the satellite clock runs fast
    net_rate: np.ndarray = field(repr=False)

    @property
    def changes_sign(self) -> bool:
        return bool(self.net_rate.min() < 0 < self.net_rate.max())


def epsilon_profile(orbit: OrbitSpec, samples: int, body: Body = EARTH,
                    observatory: Optional[Body] = None) -> EpsilonProfile:
    """Clock offsets sampled uniformly in true anomaly over one revolution.

    Samples start at perigee (nu = 0); with ``samples=2`` the output is
    perigee followed by apogee.
    """
    if samples < 2:
        raise DomainError("need at least two samples")
    observatory = observatory or body
    e = orbit.eccentricity
    nu = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    r = orbit.a * (1 - e * e) / (1 + e * np.cos(nu))
    if np.any(r <= body.radius):
        raise DomainError("orbit intersects the body")
    eps_sat = body.schwarzschild_radius * (1.0 / r - 1.0 / (4.0 * orbit.a))
    eps_obs = epsilon_observatory(observatory)
    return EpsilonProfile(nu, r, eps_sat, eps_obs, eps_obs - eps_sat)


def integration_time(pass_: PassGeometry) -> float:
    """Line-of-sight time per pass for a prograde circular orbit.

    Evaluates the closed form as published, cross term included without the
    factor 2 a law-of-cosines chord would carry, so it runs somewhat longer
    than the exact arc; ``integration_time_chord`` gives the exact value.
    """
    R, a, th = pass_.body.radius, pass_.a, pass_.theta_m
    rate = math.sqrt(pass_.body.gm / a**3) - pass_.body.rotation_rate
    if not rate > 0:
        raise SuperSynchronousError(
            f"orbit at a={a:.4g} m does not outrun the body rotation")
    return 2.0 * math.sqrt(R * R + a * a - R * a * math.sin(th)) / rate * math.cos(th) / a


def integration_time_chord(pass_: PassGeometry) -> float:
    """Exact visible-arc duration for the same simplified geometry (reference only)."""
    R, a, th = pass_.body.radius, pass_.a, pass_.theta_m
    rate = math.sqrt(pass_.body.gm / a**3) - pass_.body.rotation_rate
    if not rate > 0:
        raise SuperSynchronousError(
            f"orbit at a={a:.4g} m does not outrun the body rotation")
    half_arc = math.acos(R * math.cos(th) / a) - th
    return 2.0 * half_arc / rate


def geostationary_radius(body: Body = EARTH) -> float:
    return (body.gm / body.rotation_rate**2) ** (1.0 / 3.0)


def simultaneity_window(v_rel: float, distance: float) -> float:
    """Maximum detection-time offset v*D/c^2 for a before-before configuration."""
    if not 0 < v_rel < C:
        raise DomainError("relative speed must lie in (0, c)")
    if not distance > 0:
        raise DomainError("separation must be positive")
    return v_rel * distance / C**2


def light_travel_distance(dt: float) -> float:
    return C * dt


def polarization_counts_for_angle_error(delta_theta: float) -> float:
    """Photon count needed for a polarization-angle standard error of ``delta_theta``."""
    if not delta_theta > 0:
        raise DomainError("angle error must be positive")
    return 1.0 / (4.0 * delta_theta**2)


@dataclass(frozen=True)
class HumanBellGeometry:
    min_source_distance: float
    fraction_of_earth_moon: float
    rate_gain_vs_full: float
    rate_gain_vs_midway: float
    # None when the timing did not specify a source distance
    satisfied: Optional[bool] = None


def human_bell_geometry(timing: HumanBellTiming,
                        earth_moon: float = CONST.d_earth_moon) -> HumanBellGeometry:
    """Source-distance constraint for a human-choice Bell test.

    Pair delivery scales as 1/R^4, so rate gains compare the fourth powers of
    the Earth-Moon (or half Earth-Moon) distance to the minimum one.
    """
    d = C * (timing.t_transmit - timing.t_question)
    ok = None if timing.source_distance is None else timing.source_distance >= d
    return HumanBellGeometry(
        min_source_distance=d,
        fraction_of_earth_moon=d / earth_moon,
        rate_gain_vs_full=(earth_moon / d) ** 4,
        rate_gain_vs_midway=(0.5 * earth_moon / d) ** 4,
        satisfied=ok,
    )


def decision_window_midway(source_distance_to_earth: float,
                           source_distance_to_moon: float) -> tuple[float, float]:
    """Decision windows (t_E, t_M): twice each side's light time to the source."""
    if source_distance_to_earth < 0 or source_distance_to_moon < 0:
        raise DomainError("distances must be non-negative")
    return 2.0 * source_distance_to_earth / C, 2.0 * source_distance_to_moon / C
