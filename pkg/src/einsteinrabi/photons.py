"""Photon-number statistics of the cavity field and Planck densities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from . import constants as const
from .errors import DomainError

TRUNCATION_MASS = 1e-12


class FieldKind(str, Enum):
    THERMAL = "thermal"
    COHERENT = "coherent"


@dataclass(frozen=True)
class PhotonField:
    """Field statistics at the mode frequency ``omega0`` (rad/s).

    Thermal fields carry a temperature in K (zero allowed, meaning vacuum);
    coherent fields carry their mean photon number directly.
    """

    kind: FieldKind
    omega0: float
    temperature: float | None = None
    nbar_coherent: float | None = None

    def __post_init__(self):
        if not self.omega0 > 0:
            raise DomainError("omega0 must be positive")
        if self.kind is FieldKind.THERMAL:
            if self.temperature is None or self.temperature < 0:
                raise DomainError("thermal field needs a temperature >= 0")
        elif self.kind is FieldKind.COHERENT:
            if self.nbar_coherent is None or self.nbar_coherent < 0:
                raise DomainError("coherent field needs nbar >= 0")
        else:
            raise DomainError(f"unknown field kind {self.kind!r}")

    @classmethod
    def thermal(cls, omega0: float, temperature: float) -> "PhotonField":
        return cls(FieldKind.THERMAL, omega0, temperature=temperature)

    @classmethod
    def thermal_with_nbar(cls, omega0: float, nbar: float) -> "PhotonField":
        """Thermal field whose temperature reproduces the given mean occupancy."""
        if nbar < 0 or not math.isfinite(nbar):
            raise DomainError("nbar must be finite and >= 0")
        if nbar == 0:
            return cls.thermal(omega0, 0.0)
        x = math.log1p(1.0 / nbar)
        return cls.thermal(omega0, const.hbar * omega0 / (const.kB * x))

    @classmethod
    def coherent(cls, omega0: float, nbar: float) -> "PhotonField":
        return cls(FieldKind.COHERENT, omega0, nbar_coherent=nbar)

    @property
    def is_thermal(self) -> bool:
        return self.kind is FieldKind.THERMAL


def boltzmann_exponent(omega0: float, temperature: float) -> float:
    """hbar*omega0 / (kB*T); infinite at T = 0."""
    if temperature == 0:
        return math.inf
    return const.hbar * omega0 / (const.kB * temperature)


def thermal_nbar(omega0: float, temperature: float) -> float:
    x = boltzmann_exponent(omega0, temperature)
    if math.isinf(x):
        return 0.0
    return 1.0 / math.expm1(x)


def mean_photon_number(field: PhotonField) -> float:
    if field.is_thermal:
        return thermal_nbar(field.omega0, field.temperature)
    return float(field.nbar_coherent)


def photon_number_fluctuation(field: PhotonField) -> float:
    """Standard deviation of the photon number."""
    nbar = mean_photon_number(field)
    if field.is_thermal:
        return math.sqrt(nbar * (nbar + 1.0))
    return math.sqrt(nbar)


def occupation_probability(field: PhotonField, n):
    """p_n: geometric in n for thermal fields, Poisson for coherent ones."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise DomainError("photon number must be >= 0")
    nbar = mean_photon_number(field)
    n_f = n_arr.astype(float)
    if field.is_thermal:
        if nbar == 0.0:
            p = np.where(n_arr == 0, 1.0, 0.0)
        else:
            ratio = nbar / (1.0 + nbar)
            p = np.exp(n_f * math.log(ratio)) / (1.0 + nbar)
    else:
        if nbar == 0.0:
            p = np.where(n_arr == 0, 1.0, 0.0)
        else:
            p = np.exp(n_f * math.log(nbar) - nbar - gammaln(n_f + 1.0))
    if np.ndim(n) == 0:
        return float(p)
    return p


def truncation_order(field: PhotonField, mass: float = TRUNCATION_MASS) -> int:
    """Largest n to keep so the discarded tail probability is below ``mass``.

    Thermal tails are exact (geometric remainder); Poisson tails use the
    Chernoff bound P(N >= k) <= exp(-nbar) (e*nbar/k)^k for k > nbar.
    """
    nbar = mean_photon_number(field)
    if nbar == 0.0:
        return 0
    if field.is_thermal:
        ratio = nbar / (1.0 + nbar)
        # tail P(N > N_max) = ratio^(N_max + 1)
        return max(0, int(math.ceil(math.log(mass) / math.log(ratio))) - 1)
    k = max(1, int(math.floor(nbar)) + 1)
    while -nbar + k * (1.0 + math.log(nbar / k)) > math.log(mass):
        k += 1
    return k - 1


def photon_distribution(field: PhotonField, mass: float = TRUNCATION_MASS):
    """(n, p_n) arrays truncated by :func:`truncation_order`."""
    n = np.arange(truncation_order(field, mass) + 1)
    return n, occupation_probability(field, n)


def planck_density_per_photon(omega0: float) -> float:
    """hbar*omega0^3 / (pi^2 c^3), in J s / m^3."""
    if not omega0 > 0:
        raise DomainError("omega0 must be positive")
    return const.hbar * omega0**3 / (math.pi**2 * const.c**3)


def planck_energy_density(field: PhotonField) -> float:
    """u(omega0) = u~(omega0) * nbar, the thermal spectral energy density."""
    return planck_density_per_photon(field.omega0) * mean_photon_number(field)
