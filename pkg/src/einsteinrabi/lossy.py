r"""Dimensionless single-photon-number term of the lossy-cavity probability.

With :math:`x = \omega_n t` and :math:`\kappa = (\omega_0/Q')/\omega_n` the
per-n contribution to the emission probability is
``A(0) p_n (n+1) / omega_n * G(x, kappa)`` where

.. math::

    G(x, \kappa) = \frac{4}{\pi}\int_0^\infty
        \frac{\kappa^2}{4 s^2 + \kappa^2}
        \frac{\sin^2(x\sqrt{1+s^2}/2)}{1+s^2}\, ds ,

obtained from the Lorentzian-weighted integral over the n-photon Rabi
frequency with the substitution :math:`\Omega^2 = \omega_n^2 + s^2`, which
removes the inverse square-root endpoint singularity.

Two evaluators are provided:

``lossy_term_frequency``
    Splits :math:`\sin^2 = (1-\cos)/2`. The non-oscillating half is
    :math:`\kappa/(\kappa+2)` in closed form; the cosine half is integrated
    with Gauss-Legendre panels up to :math:`\Omega = 2\omega_n` and with
    QUADPACK's Fourier-integral routine beyond.

``lossy_term_time``
    Uses the equivalent time-domain form

    .. math::

        G(x, \kappa) = \int_0^x dy \int_0^y \frac{\kappa}{2}
            e^{-\kappa\sigma/2} J_0\big(\sqrt{y^2-\sigma^2}\big)\, d\sigma ,

    which follows from writing the Lorentzian as the cosine transform of
    :math:`e^{-\kappa\sigma/2}`. It is fully vectorised and evaluates a
    whole time grid with one cumulative pass.

As :math:`\kappa\to\infty` both reduce to :math:`\int_0^x J_0`, the
ideal-cavity term.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import DomainError, NumericalError
from .specfun import bessel_j0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_GL16_NODES, _GL16_WEIGHTS = np.polynomial.legendre.leggauss(16)

_GAUSS = {k: np.polynomial.legendre.leggauss(k) for k in (6, 10, 16)}

_EXP_CUTOFF = 40.0  # e^-40 ~ 4e-18
_OUTER_STEP = 3.0
_CHUNK = 2_000_000
_TAIL_RETRIES = 4


def _gauss(k: int):
    return _GAUSS[k]


def lossy_term_limit(kappa: float) -> float:
    """G(infinity, kappa) = kappa / (kappa + 2)."""
    return kappa / (kappa + 2.0)


def _check(kappa: float):
    if not (kappa > 0 and math.isfinite(kappa)):
        raise DomainError(f"kappa must be positive and finite, got {kappa!r}")


def _near_breakpoints(x: float, kappa: float, s_max: float) -> np.ndarray:
    step = 0.25 if x <= 0 else min(0.25, math.pi / x)
    pts = [np.linspace(0.0, s_max, int(math.ceil(s_max / step)) + 1)]
    half = 0.5 * kappa
    if half < s_max:
        geo = half * np.geomspace(1.0 / 16.0, s_max / half, 48)
        pts.append(geo[geo < s_max])
    return np.unique(np.concatenate(pts))


def _near_part(x: float, kappa: float, s_lo: float, s_hi: float) -> float:
    k2 = kappa * kappa
    bp = _near_breakpoints(x, kappa, s_hi)
    bp = np.unique(np.concatenate([[s_lo], bp[(bp > s_lo) & (bp < s_hi)], [s_hi]]))
    a, b = bp[:-1, None], bp[1:, None]
    s = 0.5 * (b - a) * (_GL_NODES[None, :] + 1.0) + a
    w = 0.5 * (b - a) * _GL_WEIGHTS[None, :]
    f = k2 / (4.0 * s * s + k2) * np.cos(x * np.sqrt(1.0 + s * s)) / (1.0 + s * s)
    return math.fsum((f * w).ravel().tolist())


def _fourier_tail(x: float, kappa: float, om_start: float):
    k2 = kappa * kappa

    def tail_amp(om):
        r = om * om - 1.0
        return k2 / (4.0 * r + k2) / (om * math.sqrt(r))

    # QUADPACK sometimes flags the slowly decaying cycles even when its error
    # estimate is tiny, so the estimate alone decides acceptance.
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        if x > 0:
            tail, err = quad(tail_amp, om_start, np.inf, weight="cos", wvar=x,
                             epsabs=1e-14, limlst=200, limit=200)
        else:
            tail, err = quad(tail_amp, om_start, np.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
    return tail, err, caught


def _oscillating_part(x: float, kappa: float) -> float:
    """(2/pi) * integral of L(s) cos(x sqrt(1+s^2)) / (1+s^2) over s >= 0.

    Gauss-Legendre panels cover Omega <= om_start * omega_n, QUADPACK's
    Fourier routine the rest. Should the Fourier tail not converge, its start
    is moved outwards (Lorentzian knees at large kappa upset the
    extrapolation) and the gap is filled with more panels.
    """
    om_start, s_done, near = 2.0, 0.0, 0.0
    for _ in range(_TAIL_RETRIES):
        s_max = math.sqrt(om_start * om_start - 1.0)
        near += _near_part(x, kappa, s_done, s_max)
        tail, err, caught = _fourier_tail(x, kappa, om_start)
        if err <= 1e-11:
            return 2.0 / math.pi * (near + tail)
        s_done = s_max
        om_start *= 4.0
    detail = "; ".join(str(w.message).splitlines()[0] for w in caught)
    raise NumericalError(
        f"lossy tail quadrature error estimate {err:.2e} at x={x:g}, kappa={kappa:g}"
        + (f" ({detail})" if detail else "")
    )


def lossy_term_frequency(x: float, kappa: float) -> float:
    """G(x, kappa) by frequency-domain quadrature (scalar x >= 0)."""
    _check(kappa)
    if x < 0:
        raise DomainError("x must be >= 0")
    if x == 0:
        return 0.0
    return lossy_term_limit(kappa) - _oscillating_part(float(x), kappa)


def _inner(y: np.ndarray, kappa: float) -> np.ndarray:
    """D(y) = (kappa/2) int_0^y e^{-kappa s/2} J0(sqrt(y^2 - s^2)) ds, via s = y sin(theta)."""
    out = np.zeros_like(y)
    pos = y > 0
    yp = y[pos]
    if yp.size == 0:
        return out
    ratio = 2.0 * _EXP_CUTOFF / (kappa * yp)
    theta_max = np.where(ratio >= 1.0, 0.5 * math.pi, np.arcsin(np.minimum(ratio, 1.0)))
    decay = np.minimum(0.5 * kappa * yp * np.sin(theta_max), _EXP_CUTOFF)
    m = 1 + np.ceil(yp * theta_max / 6.0).astype(int) + np.ceil(decay / 4.0).astype(int)
    owner = np.repeat(np.arange(yp.size), m)
    first = np.repeat(np.cumsum(m) - m, m)
    idx = np.arange(owner.size) - first
    width = (theta_max / m)[owner]
    start = idx * width
    result = np.zeros(yp.size)
    for lo in range(0, owner.size, _CHUNK // len(_GL16_NODES)):
        sl = slice(lo, lo + _CHUNK // len(_GL16_NODES))
        th = start[sl, None] + 0.5 * width[sl, None] * (_GL16_NODES[None, :] + 1.0)
        yy = yp[owner[sl]][:, None]
        f = np.exp(-0.5 * kappa * yy * np.sin(th)) * bessel_j0(yy * np.cos(th)) * np.cos(th)
        panel = 0.5 * width[sl] * (f @ _GL16_WEIGHTS)
        result += np.bincount(owner[sl], weights=panel, minlength=yp.size)
    out[pos] = 0.5 * kappa * yp * result
    return out


def lossy_term_time(x, kappa: float):
    """G(x, kappa) for an array of x >= 0 via the time-domain double integral."""
    _check(kappa)
    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs)
    if np.any(flat < 0) or not np.all(np.isfinite(flat)):
        raise DomainError("x must be finite and >= 0")
    targets = np.unique(flat)
    x_max = float(targets[-1]) if targets.size else 0.0
    if x_max == 0.0:
        res = np.zeros_like(flat)
        return float(res[0]) if xs.ndim == 0 else res.reshape(xs.shape)
    mesh = [np.linspace(0.0, x_max, int(math.ceil(x_max / _OUTER_STEP)) + 1), targets]
    layer = 2.0 / kappa  # D(y) switches on like 1 - exp(-kappa y / 2)
    if layer < _OUTER_STEP:
        geo = layer * np.geomspace(1.0 / 16.0, _OUTER_STEP / layer, 32)
        mesh.append(geo[geo < x_max])
    bp = np.unique(np.concatenate(mesh + [[0.0]]))
    a, b = bp[:-1], bp[1:]
    panels = np.empty(a.size)
    width = b - a
    # short panels (dense target grids) need far fewer nodes than full ones
    order = np.where(width <= 0.3, 6, np.where(width <= 1.0, 10, 16))
    for k in np.unique(order):
        sel = order == k
        nodes, weights = _gauss(int(k))
        y = 0.5 * width[sel][:, None] * (nodes[None, :] + 1.0) + a[sel][:, None]
        d = _inner(y.ravel(), kappa).reshape(y.shape)
        panels[sel] = 0.5 * width[sel] * (d @ weights)
    cumulative = np.concatenate([[0.0], np.cumsum(panels)])
    res = cumulative[np.searchsorted(bp, flat)]
    if xs.ndim == 0:
        return float(res[0])
    return res.reshape(xs.shape)
