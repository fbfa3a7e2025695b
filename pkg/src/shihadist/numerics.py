"""Numerical kernel: Lambert W, bracketed roots, adaptive quadrature and
the null distributions behind the K-S and A-D p-values.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BracketError, ConvergenceError, DomainError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "lambert_w0",
    "find_root_bracketed",
    "integrate_adaptive",
    "kolmogorov_sf",
    "kolmogorov_cdf_exact",
    "anderson_darling_sf",
]


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule shared by the iterative routines.

    Parameters
    ----------
    abs_tol : float
        Absolute tolerance, strictly positive.
    rel_tol : float
        Relative tolerance, nonnegative.
    max_iter : int
        Iteration (or subdivision) budget, at least 1.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be > 0, got {self.abs_tol}")
        if not self.rel_tol >= 0:
            raise DomainError(f"rel_tol must be >= 0, got {self.rel_tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {self.max_iter}")


DEFAULT_TOL = Tolerance()


# --------------------------------------------------------------------------
# Lambert W
# --------------------------------------------------------------------------

def lambert_w0(x):
    """Principal branch of the Lambert W function for ``x >= 0``.

    Solves ``w * exp(w) = x`` by Halley iteration started at ``log1p(x)``.
    Accepts a scalar or an array; returns the same shape.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(x_arr)) or np.any(x_arr < 0):
        raise DomainError("lambert_w0 is only defined here for x >= 0")
    w = np.log1p(x_arr)
    for _ in range(100):
        ew = np.exp(w)
        r = w * ew - x_arr
        wp1 = w + 1.0
        step = r / (ew * wp1 - (w + 2.0) * r / (2.0 * wp1))
        w = w - step
        if np.all(np.abs(step) <= 4e-16 * (1.0 + np.abs(w))):
            break
    if w.ndim == 0:
        return float(w)
    return w


# --------------------------------------------------------------------------
# Root finding
# --------------------------------------------------------------------------

def find_root_bracketed(f: Callable[[float], float], lo: float, hi: float,
                        tol: Tolerance = DEFAULT_TOL) -> float:
    """Brent's method on ``[lo, hi]``.

    Inverse quadratic / secant steps are accepted only while they keep
    shrinking the bracket fast enough; otherwise the step falls back to
    bisection, so convergence is guaranteed for continuous ``f``.

    Raises
    ------
    BracketError
        If ``f(lo)`` and ``f(hi)`` have the same strict sign.
    ConvergenceError
        If ``tol.max_iter`` iterations pass without meeting the tolerance.
    """
    a, b = float(lo), float(hi)
    fa, fb = float(f(a)), float(f(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise BracketError(f"f is not finite at the bracket ends ({fa}, {fb})")
    if fa * fb > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f = ({fa:.3g}, {fb:.3g})")

    c, fc = a, fa
    d = e = b - a
    for _ in range(tol.max_iter):
        if fb * fc > 0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        # half the interval-width target; 2*eps*|b| guards against stalling
        delta = 2.0 * 2.2e-16 * abs(b) + 0.5 * tol.abs_tol
        m = 0.5 * (c - b)
        if abs(fb) <= tol.abs_tol or abs(m) <= delta:
            return b
        if abs(e) >= delta and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(delta * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b = b + (d if abs(d) > delta else math.copysign(delta, m))
        fb = float(f(b))
    raise ConvergenceError(f"Brent did not converge in {tol.max_iter} iterations", partial=b)


# --------------------------------------------------------------------------
# Quadrature
# --------------------------------------------------------------------------

# Kronrod 15 / Gauss 7 pair, nodes on [0, 1] of the symmetric rule.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _eval_vec(f, x):
    try:
        y = np.asarray(f(x), dtype=float)
    except TypeError:
        y = None
    if y is None or y.shape != x.shape:
        y = np.array([float(f(xi)) for xi in x])
    return y


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y = _eval_vec(f, mid + half * _NODES)
    k = half * float(_KWEIGHTS @ y)
    g = half * float(_GWEIGHTS @ y)
    return k, abs(k - g)


def integrate_adaptive(f: Callable, a: float, b: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of ``f`` over ``[a, b]``.

    ``f`` is called with a 1-d array of nodes; scalar-only callables are
    detected and evaluated point by point. The interval with the largest
    error estimate is bisected until the summed estimate drops below
    ``max(abs_tol, rel_tol * |result|)``. ``tol.max_iter`` bounds the
    number of subintervals.
    """
    a, b = float(a), float(b)
    if not a < b:
        raise DomainError(f"integration requires a < b, got [{a}, {b}]")
    k, err = _gk15(f, a, b)
    intervals = [(err, a, b, k)]
    total, total_err = k, err
    while total_err > max(tol.abs_tol, tol.rel_tol * abs(total)):
        if len(intervals) >= tol.max_iter:
            raise ConvergenceError(
                f"quadrature error {total_err:.3g} after {len(intervals)} subintervals",
                partial=total,
            )
        idx = max(range(len(intervals)), key=lambda i: intervals[i][0])
        e0, lo, hi, k0 = intervals.pop(idx)
        mid = 0.5 * (lo + hi)
        k1, e1 = _gk15(f, lo, mid)
        k2, e2 = _gk15(f, mid, hi)
        intervals.append((e1, lo, mid, k1))
        intervals.append((e2, mid, hi, k2))
        # re-sum rather than update in place; keeps rounding from drifting
        total = math.fsum(iv[3] for iv in intervals)
        total_err = math.fsum(iv[0] for iv in intervals)
    return total


# --------------------------------------------------------------------------
# Kolmogorov distribution
# --------------------------------------------------------------------------

def _kolmogorov_asymptotic_sf(lam: float) -> float:
    if lam <= 0.05:
        # the limiting cdf is below 1e-200 here
        return 1.0
    if lam < 1.18:
        # Jacobi-theta form converges fast where the alternating series is slow
        s = 0.0
        c = math.pi ** 2 / (8.0 * lam * lam)
        for j in range(1, 200, 2):
            term = math.exp(-j * j * c)
            s += term
            if term < 1e-16:
                break
        cdf = math.sqrt(2.0 * math.pi) / lam * s
        return min(1.0, max(0.0, 1.0 - cdf))
    s = 0.0
    for j in range(1, 200):
        term = math.exp(-2.0 * j * j * lam * lam)
        s += term if j % 2 else -term
        if term < 1e-12:
            break
    return min(1.0, max(0.0, 2.0 * s))


def kolmogorov_cdf_exact(d: float, n: int) -> float:
    """Exact ``P(D_n < d)`` for the two-sided one-sample statistic.

    Marsaglia, Tsang & Wang (2003) matrix-power algorithm, with the
    running scale kept in log space so it works for a few thousand ``n``.
    """
    if d <= 0:
        return 0.0
    if d >= 1:
        return 1.0
    nd = n * d
    if nd <= 0.5:
        # D_n >= 1/(2n) always
        return 0.0
    k = int(nd) + 1
    m = 2 * k - 1
    h = k - nd
    i = np.arange(m)
    diff = i[:, None] - i[None, :] + 1
    H = (diff >= 0).astype(float)
    H[:, 0] -= h ** (i + 1)
    H[m - 1, :] -= h ** (m - i)
    if 2 * h - 1 > 0:
        H[m - 1, 0] += (2 * h - 1) ** m
    log_fact = np.array([math.lgamma(v + 1) if v > 0 else 0.0 for v in diff.ravel()])
    H *= np.exp(-log_fact).reshape(m, m)

    result = np.eye(m)
    log_scale = 0.0
    base = H
    base_log = 0.0
    p = n
    while p:
        if p & 1:
            result = result @ base
            log_scale += base_log
            s = np.abs(result).max()
            if s == 0:
                return 0.0
            result /= s
            log_scale += math.log(s)
        p >>= 1
        if p:
            base = base @ base
            base_log *= 2.0
            s = np.abs(base).max()
            if s == 0:
                return 0.0
            base /= s
            base_log += math.log(s)
    q = result[k - 1, k - 1]
    if q <= 0:
        return 0.0
    log_p = math.log(q) + log_scale + math.lgamma(n + 1) - n * math.log(n)
    return min(1.0, max(0.0, math.exp(log_p)))


def kolmogorov_sf(d: float, n: int, exact: bool | None = None) -> float:
    """Survival function ``P(D_n >= d)`` of the two-sided K-S statistic.

    Parameters
    ----------
    d : float
        Observed statistic in ``[0, 1]``.
    n : int
        Sample size.
    exact : bool or None
        ``True`` uses the finite-``n`` distribution, ``False`` the
        asymptotic law of ``sqrt(n) * d``. ``None`` picks exact for
        ``n < 100``, the usual convention for continuous data without ties.
    """
    if not 0.0 <= d <= 1.0:
        raise DomainError(f"K-S distance must lie in [0, 1], got {d}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    if exact is None:
        exact = n < 100
    if exact:
        return min(1.0, max(0.0, 1.0 - kolmogorov_cdf_exact(d, n)))
    return _kolmogorov_asymptotic_sf(math.sqrt(n) * d)


# --------------------------------------------------------------------------
# Anderson-Darling distribution (fully specified null)
# --------------------------------------------------------------------------

def _adinf(z: float) -> float:
    # Marsaglia & Marsaglia (2004) approximation of the limiting cdf
    if z < 2.0:
        return (math.exp(-1.2337141 / z) / math.sqrt(z)
                * (2.00012 + (0.247105 - (0.0649821 - (0.0347962 - (0.0116720 - 0.00168691 * z)
                                                       * z) * z) * z) * z))
    return math.exp(-math.exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z)
                                                              * z) * z) * z) * z))


def _ad_errfix(n: int, x: float) -> float:
    # finite-n correction to the limiting cdf value x
    if x > 0.8:
        return (-130.2137 + (745.2337 - (1705.091 - (1950.646 - (1116.360 - 255.7844 * x)
                                                     * x) * x) * x) * x) / n
    c = 0.01265 + 0.1757 / n
    if x < c:
        t = x / c
        t = math.sqrt(t) * (1.0 - t) * (49.0 * t - 102.0)
        return t * (0.0037 / (n * n) + 0.00078 / n + 0.00006) / n
    t = (x - c) / (0.8 - c)
    t = -0.00022633 + (6.54034 - (14.6538 - (14.458 - (8.259 - 1.91864 * t) * t) * t) * t) * t
    return t * (0.04213 + 0.01365 / n) / n


def anderson_darling_sf(a2: float, n: int | None = None) -> float:
    """Upper-tail probability of the A-D statistic under a fully specified null.

    With ``n=None`` the limiting distribution is used; with a sample size
    the finite-``n`` correction is added on top of it.
    """
    if not a2 >= 0:
        raise DomainError(f"A-D statistic must be >= 0, got {a2}")
    if n is not None and (int(n) != n or n < 1):
        raise DomainError(f"n must be a positive integer, got {n}")
    if a2 == 0:
        return 1.0
    x = _adinf(float(a2))
    if n is not None:
        x += _ad_errfix(int(n), x)
    return min(1.0, max(0.0, 1.0 - x))
