"""The Shiha lifetime distribution.

A two-parameter law on ``[0, inf)`` with rate ``omega > 0`` and shape
weight ``eta >= 0``::

    f(y) = omega / (omega + 3 eta) * [omega + (2 eta + 8 omega eta y) exp(-omega y)] * exp(-omega y)

It is the mixture ``p1 Exp(omega) + p2 Exp(2 omega) + p3 Gamma(2, 2 omega)``
with ``(p1, p2, p3) = (omega, eta, 2 eta) / (omega + 3 eta)`` and collapses
to ``Exp(omega)`` at ``eta = 0``.

Density-type functions accept a scalar or an array of ``y`` and return a
float or an ndarray accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .numerics import DEFAULT_TOL, Tolerance, find_root_bracketed, integrate_adaptive, lambert_w0

__all__ = [
    "ShihaParams",
    "MixtureWeights",
    "HazardPeak",
    "Descriptors",
    "pdf",
    "log_pdf",
    "log_pdf_kernel",
    "cdf_kernel",
    "cdf",
    "survival",
    "hazard",
    "hazard_peak",
    "quantile",
    "quantile_equation",
    "mgf",
    "raw_moment",
    "descriptors",
    "entropy",
    "mixture_weights",
    "stress_strength",
    "tail_point",
    "make_rng",
    "sample_inverse",
    "sample_mixture",
]


@dataclass(frozen=True)
class ShihaParams:
    """Parameters ``(omega, eta)`` with ``omega > 0`` and ``eta >= 0``."""

    omega: float
    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise DomainError(f"omega must be finite and > 0, got {self.omega}")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise DomainError(f"eta must be finite and >= 0, got {self.eta}")


@dataclass(frozen=True)
class MixtureWeights:
    p1: float
    p2: float
    p3: float


@dataclass(frozen=True)
class HazardPeak:
    """Location ``y_star`` and height ``h_max`` of the hazard maximum."""

    y_star: float
    h_max: float


@dataclass(frozen=True)
class Descriptors:
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    excess_kurtosis: float


def _as_support(y):
    arr = np.asarray(y, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("the Shiha distribution is supported on y >= 0")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def log_pdf_kernel(y, w, e):
    """Unchecked log density; ``y``, ``w`` and ``e`` broadcast against each other."""
    t = w * y
    return np.log(w) - np.log(w + 3.0 * e) + np.log(w + (2.0 * e + 8.0 * e * t) * np.exp(-t)) - t


def cdf_kernel(y, w, e):
    """Unchecked distribution function, written with ``expm1`` for small ``y``."""
    t = w * y
    num = -w * np.expm1(-t) - 3.0 * e * np.expm1(-2.0 * t) - 4.0 * e * t * np.exp(-2.0 * t)
    return np.clip(num / (w + 3.0 * e), 0.0, 1.0)


def log_pdf(p: ShihaParams, y):
    """Log density; stays finite where the density itself underflows."""
    return _out(log_pdf_kernel(_as_support(y), p.omega, p.eta))


def pdf(p: ShihaParams, y):
    return _out(np.exp(log_pdf(p, y)))


def cdf(p: ShihaParams, y):
    return _out(cdf_kernel(_as_support(y), p.omega, p.eta))


def survival(p: ShihaParams, y):
    y = _as_support(y)
    w, e = p.omega, p.eta
    t = w * y
    et = np.exp(-t)
    s = (w + (3.0 * e + 4.0 * e * t) * et) * et / (w + 3.0 * e)
    return _out(np.clip(s, 0.0, 1.0))


def hazard(p: ShihaParams, y):
    """Hazard rate; rises from ``omega (omega + 2 eta) / (omega + 3 eta)`` towards ``omega``."""
    y = _as_support(y)
    w, e = p.omega, p.eta
    t = w * y
    et = np.exp(-t)
    return _out(w * (w + (2.0 * e + 8.0 * e * t) * et) / (w + (3.0 * e + 4.0 * e * t) * et))


def hazard_peak(p: ShihaParams) -> HazardPeak:
    """Unique hazard maximum, located through the Lambert W function.

    Raises
    ------
    DomainError
        When ``eta == 0``; the hazard is then the constant ``omega``.
    """
    if p.eta == 0:
        raise DomainError("eta = 0 gives a constant hazard; there is no interior peak")
    w = lambert_w0(4.0 * p.eta / p.omega * math.exp(-1.25))
    return HazardPeak(y_star=(w + 1.25) / p.omega, h_max=p.omega * (2.0 * w + 1.0) / (w + 1.0))


def quantile_equation(p: ShihaParams, x, prob):
    """Residual of the quantile condition in ``x = exp(-omega y)``.

    ``omega x + 3 eta x^2 - 4 eta x^2 ln x - (1 - prob)(omega + 3 eta)``,
    which vanishes at ``x = exp(-omega * quantile(prob))``.
    """
    w, e = p.omega, p.eta
    x = np.asarray(x, dtype=float)
    return _out(w * x + 3.0 * e * x * x - 4.0 * e * x * x * np.log(x) - (1.0 - prob) * (w + 3.0 * e))


def _upper_bracket(p: ShihaParams, prob: float) -> float:
    hi = 1.0 / p.omega
    while cdf(p, hi) <= prob:
        hi *= 2.0
        if not math.isfinite(hi):
            raise ConvergenceError("could not bracket the quantile")
    return hi


def _quantile_scalar(p: ShihaParams, prob: float, tol: Tolerance) -> float:
    hi = _upper_bracket(p, prob)
    return find_root_bracketed(lambda y: cdf(p, y) - prob, 0.0, hi, tol)


def _quantile_vector(p: ShihaParams, prob: np.ndarray, tol: Tolerance) -> np.ndarray:
    # Newton on F(y) - prob, kept inside a shrinking bracket (bisection
    # whenever the Newton step leaves it); all entries advance together.
    lo = np.zeros_like(prob)
    hi = np.full_like(prob, 1.0 / p.omega)
    while True:
        short = cdf(p, hi) <= prob
        if not short.any():
            break
        hi[short] *= 2.0
    y = 0.5 * (lo + hi)
    for _ in range(tol.max_iter):
        g = cdf(p, y) - prob
        lo = np.where(g < 0, y, lo)
        hi = np.where(g > 0, y, hi)
        dens = pdf(p, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            y_new = y - g / dens
        bad = ~np.isfinite(y_new) | (y_new <= lo) | (y_new >= hi)
        y_new = np.where(bad, 0.5 * (lo + hi), y_new)
        done = (np.abs(g) <= tol.abs_tol) | (hi - lo <= tol.abs_tol)
        y = np.where(done, y, y_new)
        if done.all():
            return y
    raise ConvergenceError("vectorised quantile solver did not converge", partial=y)


def quantile(p: ShihaParams, prob, tol: Tolerance = DEFAULT_TOL):
    """Quantile ``y_p`` with ``|F(y_p) - prob| <= tol.abs_tol``.

    ``F`` has no algebraic inverse, so the equation ``F(y) = prob`` is
    solved numerically on ``[0, hi]``, ``hi`` doubling from ``1/omega``
    until it brackets the root. Scalars go through Brent's method; arrays
    use a bracketed Newton iteration that advances all entries at once.
    """
    arr = np.asarray(prob, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError("quantile probabilities must lie strictly inside (0, 1)")
    if arr.ndim == 0:
        return _quantile_scalar(p, float(arr), tol)
    flat = _quantile_vector(p, arr.ravel().copy(), tol)
    return flat.reshape(arr.shape)


def mgf(p: ShihaParams, t: float) -> float:
    """Moment generating function, finite for ``t < omega``."""
    w, e = p.omega, p.eta
    if not t < w:
        raise DomainError(f"the mgf diverges for t >= omega ({t} >= {w})")
    num = (4 * w**4 + 12 * w**3 * e - 4 * w**3 * t - 14 * w**2 * e * t
           + w**2 * t**2 + 2 * w * e * t**2)
    return num / ((w + 3 * e) * (w - t) * (2 * w - t) ** 2)


def raw_moment(p: ShihaParams, k: int) -> float:
    """``E[Y**k] = (2^k omega + 2 eta k + 3 eta) k! / (2^k omega^k (omega + 3 eta))``."""
    if int(k) != k or k < 0:
        raise DomainError(f"moment order must be a nonnegative integer, got {k}")
    k = int(k)
    w, e = p.omega, p.eta
    return (2.0**k * w + 2.0 * e * k + 3.0 * e) * math.factorial(k) / (2.0**k * w**k * (w + 3.0 * e))


def descriptors(p: ShihaParams) -> Descriptors:
    w, e = p.omega, p.eta
    q = 17 * e**2 + 18 * e * w + 4 * w**2
    mean = (2 * w + 5 * e) / (2 * w * (w + 3 * e))
    var = q / (4 * w**2 * (w + 3 * e) ** 2)
    skew = (106 * e**3 + 234 * e**2 * w + 114 * e * w**2 + 16 * w**3) / q**1.5
    kurt = 3 * (611 * e**4 + 2076 * e**3 * w + 1608 * e**2 * w**2 + 472 * e * w**3 + 48 * w**4) / q**2
    return Descriptors(mean=mean, variance=var, skewness=skew, kurtosis=kurt, excess_kurtosis=kurt - 3.0)


def mixture_weights(p: ShihaParams) -> MixtureWeights:
    s = p.omega + 3.0 * p.eta
    p2 = p.eta / s
    p3 = 2.0 * p.eta / s
    return MixtureWeights(p1=p.omega / s, p2=p2, p3=p3)


def tail_point(p: ShihaParams, level: float = 1e-12) -> float:
    """Smallest power-of-two multiple of ``1/omega`` with survival below ``level``."""
    y = 1.0 / p.omega
    while survival(p, y) >= level:
        y *= 2.0
    return y


def entropy(p: ShihaParams, tol: Tolerance = DEFAULT_TOL) -> float:
    """Shannon (differential) entropy.

    ``ln((omega + 3 eta)/omega) + (2 omega + 5 eta)/(2 (omega + 3 eta)) - E[ln g(Y)]``
    with ``g(y) = omega + (2 eta + 8 omega eta y) exp(-omega y)``; the last
    expectation has no closed form and is integrated numerically up to the
    point where the survival drops below 1e-12.
    """
    w, e = p.omega, p.eta
    y_hi = tail_point(p)

    def integrand(y):
        return np.log(w + (2.0 * e + 8.0 * w * e * y) * np.exp(-w * y)) * pdf(p, y)

    expected_log = integrate_adaptive(integrand, 0.0, y_hi, tol)
    return math.log((w + 3.0 * e) / w) + (2.0 * w + 5.0 * e) / (2.0 * (w + 3.0 * e)) - expected_log


def stress_strength(strength: ShihaParams, stress: ShihaParams) -> float:
    """Reliability ``R = P(Y1 > Y2)`` for independent strength ``Y1`` and stress ``Y2``."""
    w1, e1 = strength.omega, strength.eta
    w2, e2 = stress.omega, stress.eta
    s12 = w1 + w2
    a = w2 * (w1 / s12 + 2 * e1 / (2 * w1 + w2) + 8 * w1 * e1 / (2 * w1 + w2) ** 2)
    b = 3 * e2 * (w1 / (w1 + 2 * w2) + e1 / s12 + 2 * w1 * e1 / s12**2)
    c = 4 * w2 * e2 * (w1 / (w1 + 2 * w2) ** 2 + e1 / (2 * s12**2) + 2 * w1 * e1 / s12**3)
    return 1.0 - w1 / ((w1 + 3 * e1) * (w2 + 3 * e2)) * (a + b + c)


def make_rng(seed, *stream) -> np.random.Generator:
    """PCG64 generator for ``seed``; extra integers select an independent substream.

    The entropy pool of ``numpy.random.SeedSequence`` hashes the key, so
    ``make_rng(seed, n, i)`` gives reproducible, order-independent streams.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, stream)])))


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return make_rng(seed)


def sample_inverse(p: ShihaParams, n: int, seed, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Inverse-cdf sampling: ``u ~ U(0, 1)`` then solve ``F(y) = u``.

    ``seed`` is an integer or an existing ``numpy.random.Generator``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    u = _rng(seed).random(int(n))
    # random() can return exactly 0
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    return quantile(p, u, tol)


def sample_mixture(p: ShihaParams, n: int, seed, return_components: bool = False):
    """Sampling through the three-component mixture.

    One uniform per draw picks the component by the cumulative weights
    ``(p1, p1 + p2, 1)``; the component then yields an ``Exp(omega)``, an
    ``Exp(2 omega)`` or a ``Gamma(2, 2 omega)`` variate, the last as the
    sum of two ``Exp(2 omega)`` draws.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    rng = _rng(seed)
    wts = mixture_weights(p)
    u = rng.random(n)
    comp = np.where(u <= wts.p1, 0, np.where(u <= wts.p1 + wts.p2, 1, 2))
    e1 = rng.standard_exponential(n)
    e2 = rng.standard_exponential(n)
    y = np.where(comp == 0, e1 / p.omega, np.where(comp == 1, e1 / (2.0 * p.omega), (e1 + e2) / (2.0 * p.omega)))
    if return_components:
        return y, comp
    return y
