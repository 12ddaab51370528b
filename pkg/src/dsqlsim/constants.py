"""Physical constants (CODATA 2018, IAU nominal) and elementary conversions.

Everything in the toolkit is SI internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    G: float = 6.67430e-11            # m^3 kg^-1 s^-2
    c: float = 299_792_458.0          # m/s, exact
    hbar: float = 1.054571817e-34     # J s
    k_B: float = 1.380649e-23         # J/K, exact
    tau_P: float = 5.391247e-44       # s
    T_P: float = 1.416784e32          # K
    M_earth: float = 5.9722e24        # kg
    R_earth: float = 6.371e6          # m, mean radius
    Omega_earth: float = 7.2921159e-5  # rad/s, sidereal
    M_moon: float = 7.342e22          # kg
    R_moon: float = 1.7374e6          # m
    Omega_moon: float = 2.6617e-6     # rad/s
    d_earth_moon: float = 3.844e8     # m, mean distance
    amu: float = 1.66053906660e-27    # kg
    g0: float = 9.80665               # m/s^2
    eV: float = 1.602176634e-19       # J

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if not value > 0:
                raise DomainError(f"constant {name} must be positive, got {value}")


CONST = PhysicalConstants()

# Short aliases for the hot paths.
G = CONST.G
C = CONST.c
HBAR = CONST.hbar


def wavelength_to_angular_frequency(wavelength: float) -> float:
    """Angular frequency 2*pi*c/lambda (rad/s) of a vacuum wavelength in metres."""
    if not wavelength > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength}")
    return 2.0 * math.pi * C / wavelength


def angular_frequency_split(lambda1: float, lambda2: float) -> float:
    """Absolute angular-frequency difference between two vacuum wavelengths."""
    return abs(wavelength_to_angular_frequency(lambda1)
               - wavelength_to_angular_frequency(lambda2))


def schwarzschild_radius(mass: float) -> float:
    """2GM/c^2 in metres."""
    if not mass > 0:
        raise DomainError(f"mass must be positive, got {mass}")
    return 2.0 * G * mass / C**2
