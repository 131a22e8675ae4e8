"""Net transition probabilities and generalized Einstein coefficients.

Probabilities are sums over the photon-number distribution of the field. For
each photon number n the Rabi frequency is ``omega_n = 2 g' sqrt(n+1)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .coupling import RWA_WARN_RATIO, CouplingSolution, Scenario, TwoLevelSystem
from .errors import DomainError
from .lossy import lossy_term_frequency, lossy_term_time
from .photons import (
    PhotonField,
    mean_photon_number,
    photon_distribution,
    photon_number_fluctuation,
    planck_density_per_photon,
)
from .specfun import bessel_j0, integral_j0

# rough cost model: the time-domain pass grows like x_max^2, the
# frequency-domain evaluator like the number of points
_TIME_COST_RATIO = 60.0
# per-n terms are bounded by about twice their weight A p_n (n+1) / omega_n
_NEGLIGIBLE_TERM = 1e-13


class CavityMode(str, Enum):
    IDEAL = "ideal"
    LOSSY = "lossy"


class CoefficientMode(str, Enum):
    EXACT = "exact"
    APPROX = "approx"


_LOSSY_SCENARIOS = {Scenario.LOSSY_THERMAL, Scenario.LOSSY_COHERENT}
_IDEAL_SCENARIOS = {Scenario.BLACKBODY_THERMAL, Scenario.FREE_SPACE}


@dataclass(frozen=True)
class TransitionModel:
    """An emitter, its field statistics and the coupling that ties them together."""

    system: TwoLevelSystem
    field: PhotonField
    coupling: CouplingSolution
    cavity_mode: CavityMode = CavityMode.IDEAL

    def __post_init__(self):
        mode = CavityMode(self.cavity_mode)
        object.__setattr__(self, "cavity_mode", mode)
        scen = self.coupling.scenario
        if mode is CavityMode.LOSSY:
            if scen not in _LOSSY_SCENARIOS or self.coupling.q_net is None:
                raise DomainError(f"lossy cavity needs a lossy coupling, got {scen.value}")
            omega0 = self.system.omega0
            width = omega0 / self.coupling.q_net
            if width / omega0 > RWA_WARN_RATIO or self.coupling.a0_coefficient / omega0 > RWA_WARN_RATIO:
                raise DomainError(
                    "cavity linewidth and A(0) must both be small compared with omega0"
                )
        elif scen not in _IDEAL_SCENARIOS:
            raise DomainError(f"ideal cavity needs a blackbody coupling, got {scen.value}")

    @property
    def a0(self) -> float:
        return self.coupling.a0_coefficient

    @property
    def nbar(self) -> float:
        return mean_photon_number(self.field)

    @property
    def linewidth(self) -> float:
        """omega0 / Q' in rad/s (lossy mode only)."""
        if self.coupling.q_net is None:
            raise DomainError("ideal cavity has no linewidth")
        return self.system.omega0 / self.coupling.q_net

    def distribution(self):
        n, p = photon_distribution(self.field)
        return n, p, self.coupling.rabi_frequencies(n)


def _times(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("times must be finite and >= 0")
    return arr


def _shape_like(values: np.ndarray, t):
    return float(values) if np.ndim(t) == 0 else values


def prob_ideal(model: TransitionModel, t):
    """Emission probability in a loss-free cavity.

    Each photon number contributes ``A(0) p_n (n+1) t * 1F2(-(omega_n t/2)^2)``,
    written here as ``A(0) p_n (n+1) / omega_n * int_0^{omega_n t} J0``.
    """
    ts = _times(t)
    n, p, wn = model.distribution()
    flat = ts.reshape(-1)
    x = wn[:, None] * flat[None, :]
    terms = (model.a0 * p * (n + 1.0) / wn)[:, None] * integral_j0(x)
    return _shape_like(terms.sum(axis=0).reshape(ts.shape), t)


def _lossy_terms(model, weights, wn, flat, method):
    if method not in ("auto", "time", "frequency"):
        raise DomainError(f"unknown lossy evaluator {method!r}")
    width = model.linewidth
    out = np.zeros_like(flat)
    count = np.unique(flat).size
    for w, om in zip(weights, wn):
        if w / om < _NEGLIGIBLE_TERM:
            continue
        kappa = width / om
        x = om * flat
        chosen = method
        if method == "auto":
            x_max = float(np.max(x, initial=0.0))
            chosen = "time" if x_max * x_max < _TIME_COST_RATIO * count else "frequency"
        if chosen == "time":
            g = lossy_term_time(x, kappa)
        else:
            g = np.array([lossy_term_frequency(float(xi), kappa) for xi in x])
        out += w / om * g
    return out


def prob_lossy(model: TransitionModel, t, method: str = "auto"):
    """Emission probability in a lossy cavity with Lorentzian linewidth omega0/Q'.

    ``method`` picks the time-domain evaluator (one cumulative pass over a
    grid), the frequency-domain one (independent per time point) or, with
    ``"auto"``, whichever is cheaper for the number of requested times.
    """
    if model.cavity_mode is not CavityMode.LOSSY:
        raise DomainError("prob_lossy needs a lossy-cavity model")
    ts = _times(t)
    n, p, wn = model.distribution()
    flat = ts.reshape(-1)
    weights = model.a0 * p * (n + 1.0)
    return _shape_like(_lossy_terms(model, weights, wn, flat, method).reshape(ts.shape), t)


def prob_lossy_low_nbar(model: TransitionModel, t, method: str = "auto"):
    """Lossy-cavity probability with the photon-number sum collapsed onto nbar.

    A single term at the Rabi frequency ``Omega_R`` with weight ``A(0)(nbar+1)``.
    """
    if model.cavity_mode is not CavityMode.LOSSY:
        raise DomainError("prob_lossy_low_nbar needs a lossy-cavity model")
    ts = _times(t)
    dn = photon_number_fluctuation(model.field)
    if dn > 1.0:
        warnings.warn(
            f"photon-number fluctuation {dn:.3g} > 1; the single-term form is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    flat = ts.reshape(-1)
    weights = np.array([model.a0 * (model.nbar + 1.0)])
    wn = np.array([model.coupling.omega_rabi])
    return _shape_like(_lossy_terms(model, weights, wn, flat, method).reshape(ts.shape), t)


def emission_prob(model: TransitionModel, t, method: str = "auto"):
    """P_{2->1}(t) for whichever cavity the model describes."""
    if model.cavity_mode is CavityMode.LOSSY:
        return prob_lossy(model, t, method=method)
    return prob_ideal(model, t)


def absorption_prob(model: TransitionModel, t, method: str = "auto"):
    """P_{1->2}(t) = 1 - P_{2->1}(t)."""
    return _shape_like(1.0 - np.asarray(emission_prob(model, t, method=method)), t)


def _abs_j0_sum(coupling: CouplingSolution, n, weights, t):
    ts = _times(t)
    wn = coupling.rabi_frequencies(n)
    flat = ts.reshape(-1)
    vals = np.abs(bessel_j0(wn[:, None] * flat[None, :]))
    return (np.asarray(weights)[:, None] * vals).sum(axis=0).reshape(ts.shape)


def _abs_j0_rabi(coupling: CouplingSolution, t):
    ts = _times(t)
    return np.abs(bessel_j0(coupling.omega_rabi * ts))


def generalized_A(coupling: CouplingSolution, field: PhotonField, t, mode: str = "approx"):
    """Time-dependent spontaneous coefficient A(t) in rad/s.

    ``mode="exact"`` keeps the photon-number sum of |J0(omega_n t)|;
    ``mode="approx"`` replaces it by |J0(Omega_R t)|.
    """
    mode = CoefficientMode(mode)
    if mode is CoefficientMode.EXACT:
        n, p = photon_distribution(field)
        factor = _abs_j0_sum(coupling, n, p, t)
    else:
        factor = _abs_j0_rabi(coupling, t)
    return _shape_like(coupling.a0_coefficient * factor, t)


def generalized_B21(coupling: CouplingSolution, field: PhotonField, t, mode: str = "approx"):
    """Time-dependent stimulated coefficient B21(t); B12(t) is the same function.

    The exact photon-number sum is weighted by ``n p_n / nbar`` and is
    undefined for an empty field.
    """
    mode = CoefficientMode(mode)
    if mode is CoefficientMode.EXACT:
        nbar = mean_photon_number(field)
        if nbar <= 0:
            raise DomainError("exact B21(t) is undefined at zero mean photon number")
        n, p = photon_distribution(field)
        factor = _abs_j0_sum(coupling, n, n * p / nbar, t)
    else:
        factor = _abs_j0_rabi(coupling, t)
    return _shape_like(coupling.b0_coefficient * factor, t)


generalized_B12 = generalized_B21


def emission_rate(model: TransitionModel, t, mode: str = "approx"):
    """R_{2->1}(t) = u(omega0) B21(t) + A(t), in rad/s."""
    nbar = model.nbar
    a_t = np.asarray(generalized_A(model.coupling, model.field, t, mode))
    if nbar > 0:
        u = planck_density_per_photon(model.system.omega0) * nbar
        stim = u * np.asarray(generalized_B21(model.coupling, model.field, t, mode))
    else:
        stim = 0.0
    return _shape_like(a_t + stim, t)


def absorption_rate(model: TransitionModel, t, mode: str = "approx"):
    """R_{1->2}(t) = u~(omega0) (nbar + 1) B12(t), in rad/s."""
    ut = planck_density_per_photon(model.system.omega0)
    b = np.asarray(generalized_B12(model.coupling, model.field, t, mode))
    return _shape_like(ut * (model.nbar + 1.0) * b, t)


def initial_emission_rate(model: TransitionModel) -> float:
    """A(0) (nbar + 1), the t -> 0 slope of the emission probability."""
    return model.a0 * (model.nbar + 1.0)


def windowed_mean(func, t_end: float, period: float, points: int = 64) -> float:
    """Average of ``func`` over ``[t_end - period, t_end]`` by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(points)
    ts = t_end - 0.5 * period * (1.0 - x)
    vals = np.asarray(func(ts), dtype=float)
    return float(0.5 * np.dot(w, vals))


def quasi_period(coupling: CouplingSolution) -> float:
    """2 pi / Omega_R in s."""
    return 2.0 * math.pi / coupling.omega_rabi
