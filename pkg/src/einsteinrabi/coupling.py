"""Renormalised light-matter couplings and cavity parameter algebra.

Every renormalised coupling is defined by the requirement that the net
emission probability settles at 1/2. The closed forms below are fast paths
for that condition; :func:`lossy_long_time_limit` evaluates it directly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import constants as const
from .errors import DomainError, NumericalError
from .photons import PhotonField, photon_distribution, planck_density_per_photon
from .specfun import polylog_neg_half

RWA_WARN_RATIO = 0.01


class Scenario(str, Enum):
    FREE_SPACE = "free_space"
    BLACKBODY_THERMAL = "blackbody_thermal"
    LOSSY_THERMAL = "lossy_thermal"
    LOSSY_COHERENT = "lossy_coherent"


@dataclass(frozen=True)
class TwoLevelSystem:
    omega0: float  # rad/s
    d21: float  # C m

    def __post_init__(self):
        if not self.omega0 > 0 or not self.d21 > 0:
            raise DomainError("omega0 and d21 must be positive")


@dataclass(frozen=True)
class CavityGeometry:
    """Open cylindrical cavity: bare quality factor and mirror geometry (m)."""

    q_factor: float
    mirror_radius: float
    mirror_separation: float

    def __post_init__(self):
        if min(self.q_factor, self.mirror_radius, self.mirror_separation) <= 0:
            raise DomainError("cavity parameters must be positive")

    @property
    def escape_probability(self) -> float:
        """Fraction of the cylinder surface that is open: 1 / (1 + r/h)."""
        return 1.0 / (1.0 + self.mirror_radius / self.mirror_separation)


@dataclass(frozen=True)
class CouplingSolution:
    g_prime: float  # rad/s
    omega_rabi: float  # rad/s
    a0_coefficient: float  # rad/s, possibly Purcell enhanced
    b0_coefficient: float  # (rad/s) / (J s m^-3)
    scenario: Scenario
    nbar: float
    omega0: float
    q_net: float | None = None

    def __post_init__(self):
        ratio = 2.0 * self.g_prime / self.omega0
        if ratio > RWA_WARN_RATIO:
            warnings.warn(
                f"2g'/omega0 = {ratio:.3g} exceeds {RWA_WARN_RATIO}; "
                "rotating-wave approximation is questionable",
                RuntimeWarning,
                stacklevel=3,
            )

    def rabi_frequencies(self, n) -> np.ndarray:
        """n-photon Rabi frequencies 2 g' sqrt(n + 1)."""
        return 2.0 * self.g_prime * np.sqrt(np.asarray(n, dtype=float) + 1.0)


def _b0_from_a0(a0: float, omega0: float) -> float:
    return a0 / planck_density_per_photon(omega0)


def free_space_a0(system: TwoLevelSystem) -> float:
    """Einstein A coefficient d^2 w^3 / (3 pi c^3 eps0 hbar)."""
    return (
        system.d21**2
        * system.omega0**3
        / (3.0 * math.pi * const.c**3 * const.epsilon0 * const.hbar)
    )


def einstein_b0(system: TwoLevelSystem) -> float:
    """Einstein B coefficient pi d^2 / (3 eps0 hbar^2); independent of omega0."""
    return math.pi * system.d21**2 / (3.0 * const.epsilon0 * const.hbar**2)


def renorm_blackbody(a0: float, nbar: float) -> float:
    """Renormalised coupling A(0) Li_{-1/2}(nbar/(1+nbar)) / nbar.

    Equivalent to ``a0 * sum_n p_n sqrt(n+1)`` over thermal p_n; tends to a0
    as nbar -> 0.
    """
    if a0 <= 0 or nbar < 0:
        raise DomainError("need a0 > 0 and nbar >= 0")
    if nbar == 0.0:
        return a0
    return a0 * polylog_neg_half(nbar / (1.0 + nbar)) / nbar


def blackbody_coupling(a0: float, nbar: float, omega0: float) -> CouplingSolution:
    """Ideal (blackbody) cavity coupling with Omega_R = 2 g' sqrt(nbar + 1)."""
    g = renorm_blackbody(a0, nbar)
    return CouplingSolution(
        g_prime=g,
        omega_rabi=2.0 * g * math.sqrt(nbar + 1.0),
        a0_coefficient=a0,
        b0_coefficient=_b0_from_a0(a0, omega0),
        scenario=Scenario.BLACKBODY_THERMAL,
        nbar=nbar,
        omega0=omega0,
    )


def free_space_coupling(system: TwoLevelSystem) -> CouplingSolution:
    """Free-space coefficients: the blackbody coupling at zero occupancy."""
    a0 = free_space_a0(system)
    sol = blackbody_coupling(a0, 0.0, system.omega0)
    return CouplingSolution(
        g_prime=sol.g_prime,
        omega_rabi=sol.omega_rabi,
        a0_coefficient=a0,
        b0_coefficient=einstein_b0(system),
        scenario=Scenario.FREE_SPACE,
        nbar=0.0,
        omega0=system.omega0,
    )


def net_quality_factor(geometry: CavityGeometry, a0_enhanced: float, omega0: float) -> float:
    """Q' = 1 / (1/Q + p0 A(0) / omega0)."""
    if a0_enhanced < 0 or omega0 <= 0:
        raise DomainError("need a0 >= 0 and omega0 > 0")
    return 1.0 / (1.0 / geometry.q_factor + geometry.escape_probability * a0_enhanced / omega0)


def _lossy_rabi(a0: float, nbar: float, q_net: float, omega0: float) -> float:
    # positive root of 2 W^2 Q'/w0 + W - 2 A (n+1) = 0, rationalised
    k = 16.0 * a0 * (nbar + 1.0) * q_net / omega0
    return 4.0 * a0 * (nbar + 1.0) / (1.0 + math.sqrt(1.0 + k))


def lossy_fixed_point(a0: float, nbar: float, q_net: float, omega0: float) -> CouplingSolution:
    """Lossy-cavity coupling with the photon-number fluctuation neglected.

    Solves g' = A(0) sqrt(nbar+1) / (1 + 4 g' sqrt(nbar+1) Q'/omega0).
    """
    if a0 <= 0 or nbar < 0 or q_net <= 0 or omega0 <= 0:
        raise DomainError("lossy_fixed_point needs positive a0, q_net, omega0 and nbar >= 0")
    omega_rabi = _lossy_rabi(a0, nbar, q_net, omega0)
    return CouplingSolution(
        g_prime=omega_rabi / (2.0 * math.sqrt(nbar + 1.0)),
        omega_rabi=omega_rabi,
        a0_coefficient=a0,
        b0_coefficient=_b0_from_a0(a0, omega0),
        scenario=Scenario.LOSSY_THERMAL,
        nbar=nbar,
        omega0=omega0,
        q_net=q_net,
    )


def invert_a0_from_rabi(omega_rabi: float, nbar: float, q_net: float, omega0: float) -> float:
    """A(0) = W/(2(n+1)) + W^2 Q' / (omega0 (n+1)); free-space part plus Purcell part."""
    if omega_rabi <= 0 or nbar < 0 or q_net < 0 or omega0 <= 0:
        raise DomainError("invert_a0_from_rabi needs positive inputs")
    return omega_rabi / (2.0 * (nbar + 1.0)) + omega_rabi**2 * q_net / (omega0 * (nbar + 1.0))


def solve_cavity_coupled(
    omega_rabi: float, nbar: float, geometry: CavityGeometry, omega0: float
) -> CouplingSolution:
    """Self-consistent A(0) and Q' for a measured Rabi frequency.

    Substituting Q'(A) into the inversion formula gives a quadratic in A,
    ``alpha A^2 + (beta - a alpha) A - (a beta + b) = 0`` with
    ``alpha = p0/omega0``, ``beta = 1/Q``, ``a = W/(2(n+1))`` and
    ``b = W^2/(omega0 (n+1))``, solved for its positive root.
    """
    if omega_rabi <= 0 or nbar < 0 or omega0 <= 0:
        raise DomainError("solve_cavity_coupled needs positive inputs")
    alpha = geometry.escape_probability / omega0
    beta = 1.0 / geometry.q_factor
    a = omega_rabi / (2.0 * (nbar + 1.0))
    b = omega_rabi**2 / (omega0 * (nbar + 1.0))
    lin = beta - a * alpha
    const_term = a * beta + b
    if alpha == 0.0:
        a0 = const_term / lin
    else:
        disc = math.sqrt(lin * lin + 4.0 * alpha * const_term)
        a0 = 2.0 * const_term / (lin + disc) if lin >= 0 else (disc - lin) / (2.0 * alpha)
    q_net = net_quality_factor(geometry, a0, omega0)
    residual = abs(invert_a0_from_rabi(omega_rabi, nbar, q_net, omega0) - a0) / a0
    if not residual < 1e-10:
        raise NumericalError(f"coupled A(0)/Q' solve left residual {residual:.2e}")
    sol = lossy_fixed_point(a0, nbar, q_net, omega0)
    return sol


def lossy_term_limits(a0: float, g: float, n, p, q_net: float, omega0: float) -> np.ndarray:
    """Long-time limit of each photon-number term of the lossy probability.

    A(0) p_n (n+1) c / (w_n (c + 2 w_n)) with c = omega0/Q' and
    w_n = 2 g sqrt(n+1).
    """
    c = omega0 / q_net
    n = np.asarray(n, dtype=float)
    wn = 2.0 * g * np.sqrt(n + 1.0)
    return a0 * np.asarray(p) * (n + 1.0) * c / (wn * (c + 2.0 * wn))


def lossy_long_time_limit(a0: float, g: float, n, p, q_net: float, omega0: float) -> float:
    return math.fsum(lossy_term_limits(a0, g, n, p, q_net, omega0).tolist())


def renorm_lossy(a0: float, field: PhotonField, q_net: float, omega0: float) -> float:
    """Coupling g' for which the lossy-cavity emission probability tends to 1/2.

    Root of the long-time limit summed over the field's photon distribution,
    bracketed in [1e-3 A(0), 1e3 A(0)].
    """
    if a0 <= 0 or q_net <= 0 or omega0 <= 0:
        raise DomainError("renorm_lossy needs positive a0, q_net, omega0")
    n, p = photon_distribution(field)

    def excess(g):
        return lossy_long_time_limit(a0, g, n, p, q_net, omega0) - 0.5

    lo, hi = 1e-3 * a0, 1e3 * a0
    if not excess(lo) > 0 > excess(hi):
        raise NumericalError("lossy renormalisation root is not bracketed by [1e-3 A, 1e3 A]")
    return brentq(excess, lo, hi, xtol=1e-15 * a0, rtol=4 * np.finfo(float).eps, maxiter=500)


def renorm_coherent(
    a0: float, nbar: float, q_net: float, omega0: float, method: str = "exact"
) -> CouplingSolution:
    """Coupling for an injected coherent (Poisson) field in a lossy cavity.

    ``method="exact"`` solves the long-time condition over the full Poisson
    distribution. ``method="mean"`` neglects the photon-number fluctuation
    and uses the closed-form root with ``nbar`` in place of the sum.
    """
    if method == "exact":
        g = renorm_lossy(a0, PhotonField.coherent(omega0, nbar), q_net, omega0)
    elif method == "mean":
        g = lossy_fixed_point(a0, nbar, q_net, omega0).g_prime
    else:
        raise DomainError(f"unknown method {method!r}")
    return CouplingSolution(
        g_prime=g,
        omega_rabi=2.0 * g * math.sqrt(nbar + 1.0),
        a0_coefficient=a0,
        b0_coefficient=_b0_from_a0(a0, omega0),
        scenario=Scenario.LOSSY_COHERENT,
        nbar=nbar,
        omega0=omega0,
        q_net=q_net,
    )
