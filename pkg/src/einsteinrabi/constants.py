"""CODATA 2018 constants and unit helpers.

Every angular frequency in the package is in rad/s. Frequencies quoted in Hz
are converted exactly once, at the input boundary, with :func:`hz_to_rad_s`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34  # J s
    kB: float = 1.380649e-23  # J/K
    c: float = 299792458.0  # m/s
    epsilon0: float = 8.8541878128e-12  # F/m
    a0: float = 5.29177210903e-11  # m, Bohr radius
    e: float = 1.602176634e-19  # C


CODATA2018 = PhysicalConstants()

hbar = CODATA2018.hbar
kB = CODATA2018.kB
c = CODATA2018.c
epsilon0 = CODATA2018.epsilon0
a0 = CODATA2018.a0
e = CODATA2018.e


def dipole_from_a0e(multiple: float) -> float:
    """Transition dipole moment in C m for ``multiple`` times a0*e."""
    if not math.isfinite(multiple) or multiple <= 0:
        raise DomainError(f"dipole multiple must be positive, got {multiple!r}")
    return multiple * a0 * e


def hz_to_rad_s(f_hz: float) -> float:
    return 2.0 * math.pi * f_hz


def rad_s_to_hz(omega: float) -> float:
    return omega / (2.0 * math.pi)


def omega_from_wavelength(wavelength_m: float) -> float:
    """Angular frequency 2*pi*c/lambda of a vacuum wavelength."""
    if wavelength_m <= 0:
        raise DomainError("wavelength must be positive")
    return 2.0 * math.pi * c / wavelength_m
