"""Two-level population dynamics under time-dependent Einstein rates.

The rate equation ``dP2/dt = R(t) - [A(t) + 2 R(t)] P2`` with
``A(t) = A(0)|J0(Omega_R t)|`` and ``R(t) = R(0)|J0(Omega_R t)|`` has a
common time factor, so with ``K = A(0) + 2 R(0)`` and
``f(t) = int_0^t |J0(Omega_R tau)| dtau`` the integrating factor is
``exp(K f(t))``. Because ``f' = |J0|`` the remaining integral is elementary:

    P2(t) = R/K + (P2(0) - R/K) exp(-K f(t)).

:func:`generalized_solution` uses that closed form by default and can also
evaluate the integrating-factor integral by quadrature for cross-checks.
:func:`ode_oracle` integrates the equations directly with scipy and shares
no Bessel code with the rest of the package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import expit, jn_zeros, xlogy
from scipy.special import j0 as scipy_j0

from . import constants as const
from .coupling import CouplingSolution
from .errors import DomainError, NumericalError
from .specfun import ZERO_TABLE, abs_j0_integral, bessel_j0
from .timeseries import TimeSeries

_PROB_SLACK = 1e-12
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class PopulationState:
    """Occupation probabilities of the lower (p1) and upper (p2) level at time t.

    Fields may be scalars or equally shaped arrays.
    """

    p1: np.ndarray | float
    p2: np.ndarray | float
    t: np.ndarray | float

    def __post_init__(self):
        p1 = np.asarray(self.p1, dtype=float)
        p2 = np.asarray(self.p2, dtype=float)
        if p1.shape != p2.shape:
            raise DomainError("p1 and p2 must have the same shape")
        if np.any(np.abs(p1 + p2 - 1.0) > _PROB_SLACK):
            raise DomainError("p1 + p2 must equal 1")
        lo, hi = -_PROB_SLACK, 1.0 + _PROB_SLACK
        if np.any((p1 < lo) | (p1 > hi) | (p2 < lo) | (p2 > hi)):
            raise DomainError("probabilities must lie in [0, 1]")

    @classmethod
    def from_p2(cls, p2, t) -> "PopulationState":
        p2 = np.asarray(p2, dtype=float)
        if p2.ndim == 0:
            return cls(1.0 - float(p2), float(p2), float(t))
        return cls(1.0 - p2, p2, np.asarray(t, dtype=float))


@dataclass(frozen=True)
class RateParams:
    """Spontaneous rate a0, stimulated rate r0 = B21(0) u(omega0), and Omega_R (all rad/s).

    ``omega_rabi = 0`` switches the |J0| factor off, leaving Einstein's
    constant-rate equations.
    """

    a0: float
    r0: float
    omega_rabi: float = 0.0

    def __post_init__(self):
        if min(self.a0, self.r0, self.omega_rabi) < 0:
            raise DomainError("rates and Rabi frequency must be non-negative")

    @property
    def total(self) -> float:
        return self.a0 + 2.0 * self.r0

    @property
    def equilibrium(self) -> float:
        """Long-time upper-level population R(0) / (A(0) + 2 R(0))."""
        k = self.total
        return self.r0 / k if k > 0 else math.nan

    @classmethod
    def from_coupling(cls, coupling: CouplingSolution) -> "RateParams":
        a0 = coupling.a0_coefficient
        return cls(a0=a0, r0=a0 * coupling.nbar, omega_rabi=coupling.omega_rabi)

    @classmethod
    def from_ratios(cls, a0_over_rabi: float, r0_over_rabi: float, omega_rabi: float = 1.0):
        return cls(a0_over_rabi * omega_rabi, r0_over_rabi * omega_rabi, omega_rabi)


def _check_inputs(p2_init: float, t) -> np.ndarray:
    if not 0.0 <= p2_init <= 1.0:
        raise DomainError("p2_init must lie in [0, 1]")
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise DomainError("times must be finite and >= 0")
    return ts


def _relax(params: RateParams, p2_init: float, exponent, ts, t) -> PopulationState:
    k = params.total
    if k == 0.0:
        p2 = np.full(ts.shape, p2_init)
    else:
        eq = params.r0 / k
        p2 = eq + (p2_init - eq) * np.exp(-k * exponent)
    return PopulationState.from_p2(p2 if np.ndim(t) else float(p2), t)


def einstein_solution(params: RateParams, p2_init: float, t) -> PopulationState:
    """Constant-rate solution, relaxing at A(0) + 2R(0) towards R(0)/(A(0) + 2R(0))."""
    ts = _check_inputs(p2_init, t)
    return _relax(params, p2_init, ts, ts, t)


def effective_time(params: RateParams, t) -> np.ndarray:
    """f(t) = int_0^t |J0(Omega_R tau)| dtau, or t itself when Omega_R = 0."""
    ts = np.asarray(t, dtype=float)
    if params.omega_rabi == 0.0:
        return ts
    return np.asarray(abs_j0_integral(params.omega_rabi, ts))


def _quadrature_p2(params: RateParams, p2_init: float, ts: np.ndarray) -> np.ndarray:
    # Steps between sorted output times, each split at the |J0| kinks and
    # into panels no wider than 1/Omega_R. With F_k the integrating-factor
    # integral scaled by exp(-K f(t_k)), the recursion
    #   F_k = exp(-K (f_k - f_{k-1})) F_{k-1} + R int exp(-K (f_k - f(tau))) |J0| dtau
    # keeps every exponent non-positive, so nothing overflows.
    k = params.total
    om = params.omega_rabi
    order = np.argsort(ts, kind="stable")
    sorted_t = ts[order]
    if om > 0:
        count = int(ZERO_TABLE.count_below(np.array([om * sorted_t[-1]]))[0])
        kinks = np.array([ZERO_TABLE.zero(j) for j in range(1, count + 1)]) / om
        scale = 1.0 / om
    else:
        kinks = np.empty(0)
        scale = max(sorted_t[-1], 1.0) if k == 0 else 1.0 / k
    out = np.empty_like(sorted_t)
    state = p2_init
    prev_t, prev_f = 0.0, 0.0
    for i, tk in enumerate(sorted_t):
        if tk > prev_t:
            fk = float(effective_time(params, tk))
            inner = kinks[(kinks > prev_t) & (kinks < tk)]
            edges = np.concatenate([[prev_t], inner, [tk]])
            acc = 0.0
            for a, b in zip(edges[:-1], edges[1:]):
                m = max(1, int(math.ceil((b - a) / scale)))
                sub = np.linspace(a, b, m + 1)
                lo, hi = sub[:-1, None], sub[1:, None]
                tau = 0.5 * (hi - lo) * (_GL_NODES[None, :] + 1.0) + lo
                w = 0.5 * (hi - lo) * _GL_WEIGHTS[None, :]
                ftau = effective_time(params, tau)
                shape = np.abs(bessel_j0(om * tau)) if om > 0 else np.ones_like(tau)
                acc += float(np.sum(w * np.exp(-k * (fk - ftau)) * shape))
            state = math.exp(-k * (fk - prev_f)) * state + params.r0 * acc
            prev_t, prev_f = tk, fk
        out[i] = state
    result = np.empty_like(out)
    result[order] = out
    return result


def generalized_solution(
    params: RateParams, p2_init: float, t, method: str = "closed"
) -> PopulationState:
    """Populations under the |J0|-modulated rates.

    ``method="closed"`` uses the elementary form of the integrating-factor
    integral; ``method="quadrature"`` evaluates that integral numerically.
    """
    ts = _check_inputs(p2_init, t)
    if method == "closed":
        return _relax(params, p2_init, effective_time(params, ts), ts, t)
    if method != "quadrature":
        raise DomainError(f"unknown method {method!r}")
    flat = ts.reshape(-1)
    if flat.size == 0:
        return PopulationState.from_p2(np.empty(0), flat)
    p2 = _quadrature_p2(params, p2_init, flat).reshape(ts.shape)
    if np.any(~np.isfinite(p2)):
        raise NumericalError("integrating-factor quadrature produced non-finite values")
    return PopulationState.from_p2(p2 if np.ndim(t) else float(p2), t)


def ode_oracle(
    params: RateParams, p2_init: float, t_grid, rtol: float = 1e-10, atol: float = 1e-13
) -> TimeSeries:
    """Adaptive Runge-Kutta integration of the coupled level equations.

    Both populations are integrated, with steps forced to stop at every zero
    of J0(Omega_R t) so the kinks of |J0| fall on step boundaries.
    """
    grid = np.asarray(t_grid, dtype=float).reshape(-1)
    if grid.size == 0 or grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise DomainError("t_grid must be non-empty, start at t >= 0 and increase strictly")
    if not 0.0 <= p2_init <= 1.0:
        raise DomainError("p2_init must lie in [0, 1]")
    a0, r0, om = params.a0, params.r0, params.omega_rabi

    def rhs(tau, y):
        shape = abs(scipy_j0(om * tau)) if om > 0 else 1.0
        a, r = a0 * shape, r0 * shape
        p1, p2 = y
        flow = (a + r) * p2 - r * p1
        return [flow, -flow]

    stops = [grid[0], grid[-1]]
    if om > 0:
        zeros = jn_zeros(0, int(om * grid[-1] / math.pi) + 2) / om
        stops.extend(zeros[(zeros > grid[0]) & (zeros < grid[-1])])
    stops = np.unique(stops)
    y = np.array([1.0 - p2_init, p2_init])
    p1 = np.empty_like(grid)
    p2 = np.empty_like(grid)
    p1[0], p2[0] = y
    for a, b in zip(stops[:-1], stops[1:]):
        inside = (grid > a) & (grid < b)
        sol = solve_ivp(
            rhs, (a, b), y, method="DOP853", rtol=rtol, atol=atol,
            t_eval=np.append(grid[inside], b),
        )
        if sol.status != 0:
            raise NumericalError(f"ODE integration failed on [{a:g}, {b:g}]: {sol.message}")
        p1[inside], p2[inside] = sol.y[0, :-1], sol.y[1, :-1]
        y = sol.y[:, -1]
        if b in grid:
            p1[grid == b], p2[grid == b] = y
    return TimeSeries(grid, {"p1": p1, "p2": p2})


def entropy_over_kb(p1, p2):
    """-(p1 ln p1 + p2 ln p2), with 0 ln 0 = 0."""
    # 0.0 - x rather than -x so pure states give +0.0, not -0.0
    return 0.0 - (xlogy(p1, p1) + xlogy(p2, p2))


def entropy_over_kb_of(state: PopulationState):
    """Entropy of a state in units of kB."""
    return entropy_over_kb(np.asarray(state.p1), np.asarray(state.p2))


def entropy(state: PopulationState):
    """Entropy of the two-level distribution in J/K."""
    val = const.kB * entropy_over_kb(np.asarray(state.p1), np.asarray(state.p2))
    return float(val) if np.ndim(val) == 0 else val


def excited_weight(temperature: float, omega0: float) -> float:
    """Boltzmann probability of the upper level, 1 / (1 + exp(hbar omega0 / kB T))."""
    if not temperature > 0 or not omega0 > 0:
        raise DomainError("temperature and omega0 must be positive")
    return float(expit(-const.hbar * omega0 / (const.kB * temperature)))


def average_entropy(params: RateParams, temperature: float, omega0: float, t, over_kb: bool = False):
    """Boltzmann-weighted mean of the entropies of the two pure-start trajectories."""
    w2 = excited_weight(temperature, omega0)
    s_up = entropy_over_kb_of(generalized_solution(params, 1.0, t))
    s_down = entropy_over_kb_of(generalized_solution(params, 0.0, t))
    val = w2 * s_up + (1.0 - w2) * s_down
    if not over_kb:
        val = const.kB * val
    return float(val) if np.ndim(val) == 0 else val

