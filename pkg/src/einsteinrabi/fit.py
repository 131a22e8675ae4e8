"""Least-squares fits of vacuum-Rabi occupation traces.

The forward model is the single-term lossy-cavity probability, scaled and
shifted by nuisance ``amplitude`` and ``offset`` parameters. Bounded
parameters are mapped to unbounded ones through
``x = lo + (hi - lo) (1 + sin u) / 2`` and minimised with Nelder-Mead from
one deterministic and several seeded starting points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .coupling import (
    CavityGeometry,
    TwoLevelSystem,
    invert_a0_from_rabi,
    lossy_fixed_point,
    solve_cavity_coupled,
)
from .errors import DomainError, EinsteinRabiError, FitError
from .photons import PhotonField
from .transition import CavityMode, TransitionModel, prob_lossy_low_nbar

PARAMETERS = ("omega_rabi", "q_factor", "nbar", "amplitude", "offset")
DEFAULT_RESTARTS = 3
DEFAULT_BUDGET = 2000


@dataclass(frozen=True)
class TraceData:
    """Measured occupation probability against time, with optional weights."""

    t: np.ndarray
    value: np.ndarray
    weight: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(-1)
        v = np.asarray(self.value, dtype=float).reshape(-1)
        w = np.ones_like(t) if self.weight is None else np.asarray(self.weight, dtype=float).reshape(-1)
        if not (t.size == v.size == w.size):
            raise DomainError("t, value and weight must have equal length")
        if t.size < 8:
            raise DomainError(f"a trace needs at least 8 samples, got {t.size}")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v)) and np.all(np.isfinite(w))):
            raise DomainError("trace contains non-finite numbers")
        if np.any(np.diff(t) <= 0):
            raise DomainError("trace times must increase strictly")
        if np.any((v < -0.1) | (v > 1.1)):
            raise DomainError("trace values must lie in [-0.1, 1.1]")
        if np.any(w < 0) or not np.any(w > 0):
            raise DomainError("weights must be >= 0 and not all zero")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "weight", w)

    def __len__(self) -> int:
        return self.t.size


@dataclass(frozen=True)
class LossyRabiTemplate:
    """Parameter set of the forward model.

    With ``geometry`` given (mirror radius and separation in m), ``q_factor``
    is the bare resonator Q and A(0), Q' follow from the self-consistent
    cavity solve; without it ``q_factor`` is Q' itself and A(0) comes from
    inverting the vacuum-Rabi relation.
    """

    omega0: float
    omega_rabi: float
    q_factor: float
    nbar: float = 0.0
    amplitude: float = 1.0
    offset: float = 0.0
    geometry: tuple[float, float] | None = None

    def values(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in PARAMETERS}

    def with_values(self, **updates) -> "LossyRabiTemplate":
        return replace(self, **updates)

    def transition_model(self) -> TransitionModel:
        if self.geometry is not None:
            geo = CavityGeometry(self.q_factor, *self.geometry)
            q_net = solve_cavity_coupled(self.omega_rabi, self.nbar, geo, self.omega0).q_net
        else:
            q_net = self.q_factor
        a0 = invert_a0_from_rabi(self.omega_rabi, self.nbar, q_net, self.omega0)
        coupling = lossy_fixed_point(a0, self.nbar, q_net, self.omega0)
        field_ = PhotonField.thermal_with_nbar(self.omega0, self.nbar)
        # the dipole does not enter the probability; any positive value will do
        system = TwoLevelSystem(self.omega0, 1.0)
        return TransitionModel(system, field_, coupling, CavityMode.LOSSY)

    def evaluate(self, t) -> np.ndarray:
        p = prob_lossy_low_nbar(self.transition_model(), np.asarray(t, dtype=float), method="time")
        return self.amplitude * p + self.offset


@dataclass(frozen=True)
class FitParameter:
    value: float
    varied: bool


@dataclass(frozen=True)
class FitResult:
    parameters: dict[str, FitParameter]
    residual_rms: float
    initial_rms: float
    iterations: int
    evaluations: int
    converged: bool
    best_restart: int
    history: tuple[float, ...] = field(repr=False, default=())

    def value(self, name: str) -> float:
        return self.parameters[name].value

    def to_dict(self) -> dict:
        return {
            "parameters": {
                k: {"value": p.value, "varied": p.varied} for k, p in self.parameters.items()
            },
            "residual_rms": self.residual_rms,
            "initial_rms": self.initial_rms,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "best_restart": self.best_restart,
        }


def _to_bounded(u: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return lo + (hi - lo) * 0.5 * (1.0 + np.sin(u))


def _to_free(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    s = np.clip(2.0 * (x - lo) / (hi - lo) - 1.0, -1.0, 1.0)
    return np.arcsin(s)


class _Objective:
    """Weighted mean squared residual, recording the best value seen so far."""

    def __init__(self, data: TraceData, template: LossyRabiTemplate, names, lo, hi):
        self.data = data
        self.template = template
        self.names = names
        self.lo, self.hi = lo, hi
        self.wsum = float(np.sum(data.weight))
        self.best = math.inf
        self.best_x = None
        self.history: list[float] = []

    def params(self, x) -> dict[str, float]:
        return dict(zip(self.names, (float(v) for v in x)))

    def at(self, x: np.ndarray) -> float:
        params = self.params(x)
        try:
            model = self.template.with_values(**params).evaluate(self.data.t)
        except (EinsteinRabiError, ValueError, ArithmeticError) as exc:
            raise FitError(f"forward model failed at {params}: {exc}") from exc
        resid = model - self.data.value
        val = float(np.dot(self.data.weight, resid * resid)) / self.wsum
        if not math.isfinite(val):
            raise FitError(f"forward model returned non-finite values at {params}")
        if val < self.best:
            self.best, self.best_x = val, np.array(x, dtype=float)
        self.history.append(self.best)
        return val

    def __call__(self, u: np.ndarray) -> float:
        return self.at(_to_bounded(np.asarray(u), self.lo, self.hi))


def fit_trace(
    data: TraceData,
    template: LossyRabiTemplate,
    vary,
    bounds: dict[str, tuple[float, float]],
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    budget: int = DEFAULT_BUDGET,
) -> FitResult:
    """Fit the varied template parameters to ``data``.

    Restart 0 starts at the template values; the others start at points
    drawn uniformly within the bounds from ``numpy.random.default_rng(seed)``.
    The winner is the lowest objective, ties going to the lower restart index.
    """
    names = tuple(n for n in PARAMETERS if n in set(vary))
    unknown = set(vary) - set(PARAMETERS)
    if unknown:
        raise DomainError(f"unknown fit parameters: {sorted(unknown)}")
    if not names:
        raise DomainError("at least one parameter must vary")
    lo = np.empty(len(names))
    hi = np.empty(len(names))
    for i, name in enumerate(names):
        if name not in bounds:
            raise DomainError(f"missing bounds for {name}")
        a, b = (float(v) for v in bounds[name])
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise DomainError(f"bounds for {name} must be finite with lo < hi")
        lo[i], hi[i] = a, b
    start = np.array([getattr(template, n) for n in names], dtype=float)
    if np.any(start < lo) or np.any(start > hi):
        raise DomainError("template values must lie inside the bounds")
    if restarts < 1 or budget < 1:
        raise DomainError("restarts and budget must be positive")

    objective = _Objective(data, template, names, lo, hi)
    objective.at(0.5 * (lo + hi))  # the model must be valid at the midpoints
    initial = objective.at(start)
    rng = np.random.default_rng(seed)
    starts = [start] + [rng.uniform(lo, hi) for _ in range(restarts - 1)]

    outcomes = []
    iterations = 0
    for index, x0 in enumerate(starts):
        u0 = _to_free(x0, lo, hi)
        simplex = np.vstack([u0, u0 + 0.1 * np.eye(len(names))])
        res = minimize(
            objective, u0, method="Nelder-Mead",
            options={"maxfev": budget, "xatol": 1e-9, "fatol": 1e-15,
                     "initial_simplex": simplex},
        )
        iterations += int(res.nit)
        outcomes.append((float(res.fun), index, res))
    # the start point itself competes, so the result never beats the guess only on paper
    best_fun, best_index, best = min(outcomes, key=lambda o: (o[0], o[1]))
    if initial <= best_fun:
        best_x, best_fun = start, initial
    else:
        best_x = _to_bounded(best.x, lo, hi)
    values = template.values()
    values.update(objective.params(best_x))
    params = {n: FitParameter(values[n], n in names) for n in PARAMETERS}
    return FitResult(
        parameters=params,
        residual_rms=math.sqrt(best_fun),
        initial_rms=math.sqrt(initial),
        iterations=iterations,
        evaluations=len(objective.history),
        converged=bool(best.success),
        best_restart=best_index,
        history=tuple(objective.history),
    )
