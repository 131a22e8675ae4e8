r"""Bessel J0/J1, their zeros, the integral of J0 and related kernels.

All functions are written from scratch on top of numpy and accept scalars or
arrays. Three evaluation regimes are used:

* ``|x| <= 6``: power series (cancellation stays below ~1e-15),
* ``6 < |x| < 40``: Miller backward recurrence normalised with
  :math:`J_0 + 2\sum_k J_{2k} = 1`,
* ``|x| >= 40``: Hankel asymptotic expansions.

The integral :math:`\int_0^x J_0` uses the matching series, the identity
:math:`\int_0^x J_0 = 2\sum_k J_{2k+1}(x)` inside the recurrence window, and
an asymptotic expansion of the tail :math:`\int_x^\infty J_0` beyond it.
"""
from __future__ import annotations

import math
import threading

import numpy as np

from .errors import DomainError, NumericalError

SERIES_MAX = 6.0
ASYMPTOTIC_MIN = 40.0
_MILLER_START = 100  # even; J_100(40) ~ 1e-22


def _hankel_coefficients(nu: int, count: int = 24) -> np.ndarray:
    mu = 4.0 * nu * nu
    a = [1.0]
    for k in range(1, count):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return np.array(a)


_A0 = _hankel_coefficients(0)
_A1 = _hankel_coefficients(1)


def _tail_coefficients(count: int = 40) -> list[complex]:
    # int_x^inf H0(t) dt expanded in powers of 1/x: Hankel series for H0
    # combined with repeated integration by parts of e^{it} t^{-k-1/2}.
    a = [1.0]
    for k in range(1, count):
        a.append(a[-1] * (-((2 * k - 1) ** 2)) / (k * 8.0))
    coeffs = []
    for m in range(count):
        s = 0j
        for k in range(m + 1):
            j = m - k
            poch = 1.0
            for i in range(j):
                poch *= k + 0.5 + i
            s += (1j) ** k * a[k] * (-1j) ** j * poch
        coeffs.append(1j * s)
    return coeffs


_TAIL = np.array(_tail_coefficients()[:30])


def _prepare(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Bessel argument must be finite")
    return arr


def _j0_j1_series(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = -0.25 * x * x
    t0 = np.ones_like(x)
    t1 = np.ones_like(x)
    s0 = t0.copy()
    s1 = t1.copy()
    for k in range(1, 32):
        t0 = t0 * q / (k * k)
        t1 = t1 * q / (k * (k + 1))
        s0 += t0
        s1 += t1
        if k > 4 and np.max(np.abs(t0), initial=0.0) < 1e-18:
            break
    return s0, 0.5 * x * s1


def _int_j0_series(x: np.ndarray) -> np.ndarray:
    q = -0.25 * x * x
    t = np.ones_like(x)
    s = t.copy()
    for k in range(1, 32):
        t = t * q / (k * k)
        s += t / (2 * k + 1)
        if k > 4 and np.max(np.abs(t), initial=0.0) < 1e-18:
            break
    return x * s


def _miller_start(x: float) -> int:
    # |J_N(x)| < 1e-21 once N exceeds x + 14 x^(1/3); margin added, kept even
    n = int(math.ceil(x + 16.0 * x ** (1.0 / 3.0))) + 2
    return min(_MILLER_START, n + (n % 2))


def _miller(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """J0, J1 and 2*sum J_{2k+1} by backward recurrence, for 0 < x < 40.

    Arguments are processed in bands of width 4 so that each band starts the
    recurrence only as high as its largest argument requires.
    """
    out = [np.empty_like(x) for _ in range(3)]
    band = np.floor(x / 4.0).astype(int)
    for b in np.unique(band):
        sel = band == b
        res = _miller_band(x[sel], _miller_start(4.0 * (b + 1)))
        for o, r in zip(out, res):
            o[sel] = r
    return out[0], out[1], out[2]


def _miller_band(x: np.ndarray, start: int):
    jp1 = np.zeros_like(x)
    j = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    odd = np.zeros_like(x)
    j1 = np.zeros_like(x)
    inv = 2.0 / x
    for k in range(start, 0, -1):
        jm1 = (k * inv) * j - jp1
        jp1, j = j, jm1
        order = k - 1
        if order == 1:
            j1 = j.copy()
        if order % 2:
            odd += j
        elif order > 0:
            norm += j
        if k % 8 == 0:
            big = np.abs(j) > 1e200
            if np.any(big):
                scale = np.where(big, 1e-200, 1.0)
                j, jp1, norm, odd, j1 = j * scale, jp1 * scale, norm * scale, odd * scale, j1 * scale
    norm = 2.0 * norm + j
    return j / norm, j1 / norm, 2.0 * odd / norm


def _hankel_pq(x: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    inv = 1.0 / x
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    power = np.ones_like(x)
    for k in range(len(a)):
        term = a[k] * power
        if k % 2 == 0:
            p += term if (k // 2) % 2 == 0 else -term
        else:
            q += term if ((k - 1) // 2) % 2 == 0 else -term
        power = power * inv
    return p, q


def _j_asymptotic(x: np.ndarray, nu: int) -> np.ndarray:
    p, q = _hankel_pq(x, _A0 if nu == 0 else _A1)
    chi = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _int_j0_asymptotic(x: np.ndarray) -> np.ndarray:
    inv = 1.0 / x
    s = np.zeros(x.shape, dtype=complex)
    power = np.ones_like(x)
    for coeff in _TAIL:
        s += coeff * power
        power = power * inv
    phase = np.exp(1j * (x - 0.25 * math.pi))
    tail = (math.sqrt(2.0 / math.pi) * phase * np.sqrt(inv) * s).real
    return 1.0 - tail


def _regimes(ax: np.ndarray):
    return ax <= SERIES_MAX, (ax > SERIES_MAX) & (ax < ASYMPTOTIC_MIN), ax >= ASYMPTOTIC_MIN


def _scalar_or_array(result: np.ndarray, like):
    if np.ndim(like) == 0:
        return float(result)
    return result


def bessel_j0(x):
    """Bessel function of the first kind of order zero."""
    arr = _prepare(x)
    ax = np.abs(np.atleast_1d(arr)).astype(float)
    out = np.empty_like(ax)
    small, mid, large = _regimes(ax)
    if np.any(small):
        out[small] = _j0_j1_series(ax[small])[0]
    if np.any(mid):
        out[mid] = _miller(ax[mid])[0]
    if np.any(large):
        out[large] = _j_asymptotic(ax[large], 0)
    return _scalar_or_array(out.reshape(arr.shape), x)


def bessel_j1(x):
    """Bessel function of the first kind of order one (odd in x)."""
    arr = _prepare(x)
    flat = np.atleast_1d(arr).astype(float)
    ax = np.abs(flat)
    out = np.empty_like(ax)
    small, mid, large = _regimes(ax)
    if np.any(small):
        out[small] = _j0_j1_series(ax[small])[1]
    if np.any(mid):
        out[mid] = _miller(ax[mid])[1]
    if np.any(large):
        out[large] = _j_asymptotic(ax[large], 1)
    out = np.where(flat < 0, -out, out)
    return _scalar_or_array(out.reshape(arr.shape), x)


def integral_j0(x):
    """Integral of J0 from 0 to x, for x >= 0."""
    arr = _prepare(x)
    flat = np.atleast_1d(arr).astype(float)
    if np.any(flat < 0):
        raise DomainError("integral_j0 requires x >= 0")
    out = np.empty_like(flat)
    small, mid, large = _regimes(flat)
    if np.any(small):
        out[small] = _int_j0_series(flat[small])
    if np.any(mid):
        out[mid] = _miller(flat[mid])[2]
    if np.any(large):
        out[large] = _int_j0_asymptotic(flat[large])
    return _scalar_or_array(out.reshape(arr.shape), x)


def hyp1f2_kernel(x):
    """1F2({1/2}; {1, 3/2}; -x^2/4), i.e. (1/x) * integral of J0 over [0, x].

    Equals 1 at x = 0 and decays like 1/x. Callers pass non-negative
    arguments; the function is even so ``abs`` is the caller's job.
    """
    arr = _prepare(x)
    flat = np.atleast_1d(arr).astype(float)
    if np.any(flat < 0):
        raise DomainError("hyp1f2_kernel requires x >= 0")
    out = np.ones_like(flat)
    nz = flat > 0
    if np.any(nz):
        out[nz] = integral_j0(flat[nz]) / flat[nz]
    return _scalar_or_array(out.reshape(arr.shape), x)


class BesselZeroTable:
    """Memoised, thread-safe table of the positive zeros of J0.

    Alongside the zeros it keeps the running alternating sums
    ``S_m = sum_{j<=m} (-1)^j * int_0^{z_j} J0`` used by
    :func:`abs_j0_integral`.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._zeros = np.empty(0)
        self._signed = np.zeros(1)  # S_0 = 0

    @property
    def capacity(self) -> int:
        return len(self._zeros)

    @property
    def zeros(self) -> np.ndarray:
        return self._zeros.copy()

    def _grow(self, count: int) -> None:
        with self._lock:
            have = len(self._zeros)
            if count <= have:
                return
            count = max(count, 2 * have, 64)
            j = np.arange(have + 1, count + 1, dtype=float)
            beta = (j - 0.25) * math.pi
            b8 = 8.0 * beta
            z = beta + 1.0 / b8 - 124.0 / (3.0 * b8**3) + 120928.0 / (15.0 * b8**5)
            for _ in range(50):
                step = bessel_j0(z) / bessel_j1(z)
                z = z + step
                if np.max(np.abs(step) / z) < 1e-14:
                    break
            else:
                raise NumericalError("Newton refinement of J0 zeros did not converge")
            z = z + bessel_j0(z) / bessel_j1(z)
            zeros = np.concatenate([self._zeros, z])
            if np.any(np.diff(zeros) <= 0):
                raise NumericalError("J0 zero table is not strictly increasing")
            signs = np.where(np.arange(have + 1, count + 1) % 2 == 0, 1.0, -1.0)
            signed = self._signed[-1] + np.cumsum(signs * integral_j0(z))
            self._signed = np.concatenate([self._signed, signed])
            self._zeros = zeros

    def zero(self, j: int) -> float:
        if j < 1:
            raise DomainError(f"zero index must be >= 1, got {j}")
        if j > len(self._zeros):
            self._grow(j)
        return float(self._zeros[j - 1])

    def count_below(self, x: np.ndarray) -> np.ndarray:
        """Number of zeros z_j with z_j <= x, elementwise."""
        xmax = float(np.max(x, initial=0.0))
        while len(self._zeros) == 0 or self._zeros[-1] <= xmax:
            self._grow(max(int(xmax / math.pi) + 2, len(self._zeros) + 1))
        return np.searchsorted(self._zeros, x, side="right")

    def signed_sums(self, m: np.ndarray) -> np.ndarray:
        return self._signed[m]


ZERO_TABLE = BesselZeroTable()


def j0_zero(j: int) -> float:
    """The j-th positive zero of J0 (j >= 1)."""
    return ZERO_TABLE.zero(int(j))


def abs_j0_integral(omega_r: float, t):
    """Integral of |J0(omega_r * tau)| over tau in [0, t].

    Evaluated in closed form from the integral of J0 at t and at the zeros of
    J0 passed so far; summing over zeros ``z_j <= omega_r * t`` is equivalent
    to the unit-step weighted sum.
    """
    if not omega_r > 0:
        raise DomainError("omega_r must be positive")
    arr = _prepare(t)
    flat = np.atleast_1d(arr).astype(float)
    if np.any(flat < 0):
        raise DomainError("abs_j0_integral requires t >= 0")
    x = omega_r * flat
    m = ZERO_TABLE.count_below(x)
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    out = (sign * integral_j0(x) - 2.0 * ZERO_TABLE.signed_sums(m)) / omega_r
    return _scalar_or_array(out.reshape(arr.shape), t)


def polylog_neg_half(x: float, max_terms: int = 1_000_000) -> float:
    """Li_{-1/2}(x) = sum_{k>=1} sqrt(k) x^k for 0 <= x < 1.

    Direct summation with ``math.fsum`` until the terms drop below 1e-17 of
    the leading one.
    """
    if not (0.0 <= x < 1.0):
        raise DomainError(f"polylog_neg_half requires 0 <= x < 1, got {x!r}")
    if x == 0.0:
        return 0.0
    logx = math.log(x)
    # smallest n with sqrt(n) x^n < 1e-17 x, solved by fixed-point iteration
    n = 1.0
    for _ in range(100):
        n_new = max(1.0, (math.log(1e-17) - 0.5 * math.log(n)) / logx + 1.0)
        if abs(n_new - n) < 0.5:
            break
        n = n_new
    count = int(math.ceil(n)) + 1
    if count > max_terms:
        raise NumericalError(
            f"polylog_neg_half({x}) needs {count} terms, more than the cap {max_terms}"
        )
    k = np.arange(1, count + 1, dtype=float)
    terms = np.sqrt(k) * np.exp(k * logx)
    return math.fsum(terms.tolist())
