"""Lifetime families used as benchmarks for the Shiha model.

Each family is reachable through one evaluation surface keyed by
:class:`Family`, so fitting and goodness-of-fit code never special-cases
a model:

========  ======================================  ==================
family    name                                    parameters
========  ======================================  ==================
SHIHA     Shiha                                   (omega, eta)
APTXGD    alpha power transformed xgamma          (omega, eta)
PLD       power Lindley                           (omega, eta)
TPGLD     three-parameter generalized Lindley     (omega, eta, alpha)
CJD       Chris-Jerry                             (omega,)
AKD       Akash                                   (omega,)
========  ======================================  ==================

The ``*_kernel`` functions skip validation and broadcast ``y`` against
parameter arrays; the optimiser calls them with one parameter row per
candidate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import shiha
from .errors import DomainError
from .numerics import DEFAULT_TOL, Tolerance, find_root_bracketed

__all__ = [
    "Family",
    "ModelSpec",
    "PARAM_NAMES",
    "model_pdf",
    "model_log_pdf",
    "model_cdf",
    "model_quantile",
    "param_bounds",
    "log_pdf_kernel",
    "cdf_kernel",
]


class Family(str, enum.Enum):
    SHIHA = "shiha"
    APTXGD = "aptxgd"
    PLD = "pld"
    TPGLD = "tpgld"
    CJD = "cjd"
    AKD = "akd"

    @classmethod
    def parse(cls, name) -> "Family":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise DomainError(f"unknown family {name!r}; expected one of {[f.value for f in cls]}") from None

    @property
    def label(self) -> str:
        return "Shiha" if self is Family.SHIHA else self.name


PARAM_NAMES = {
    Family.SHIHA: ("omega", "eta"),
    Family.APTXGD: ("omega", "eta"),
    Family.PLD: ("omega", "eta"),
    Family.TPGLD: ("omega", "eta", "alpha"),
    Family.CJD: ("omega",),
    Family.AKD: ("omega",),
}


@dataclass(frozen=True)
class ModelSpec:
    """A family together with a concrete parameter vector."""

    family: Family
    params: tuple

    def __post_init__(self):
        fam = Family.parse(self.family)
        object.__setattr__(self, "family", fam)
        params = tuple(float(v) for v in np.atleast_1d(self.params))
        object.__setattr__(self, "params", params)
        if len(params) != len(PARAM_NAMES[fam]):
            raise DomainError(f"{fam.label} takes {len(PARAM_NAMES[fam])} parameters, got {len(params)}")
        if not all(math.isfinite(v) for v in params):
            raise DomainError(f"non-finite parameter in {params}")
        if fam is Family.SHIHA:
            shiha.ShihaParams(*params)
        elif not all(v > 0 for v in params):
            raise DomainError(f"{fam.label} parameters must be strictly positive, got {params}")

    @property
    def k(self) -> int:
        return len(self.params)

    def as_dict(self) -> dict:
        return dict(zip(PARAM_NAMES[self.family], self.params))


def param_bounds(family) -> list[tuple[float, float]]:
    """Box constraints used by the maximum likelihood search."""
    fam = Family.parse(family)
    bounds = [(1e-4, 1e4)] * len(PARAM_NAMES[fam])
    if fam is Family.TPGLD:
        bounds[2] = (1e-4, 1000.0)
    return bounds


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

def _log_ratio(eta):
    # log(eta) / (eta - 1), continuous through eta = 1
    r = eta - 1.0
    small = np.abs(r) < 1e-8
    safe = np.where(small, 1.0, r)
    return np.where(small, 1.0 - r / 2.0 + r * r / 3.0, np.log1p(safe) / safe)


def _xgamma_cdf(y, w):
    t = w * y
    return -np.expm1(-t) - (t + 0.5 * t * t) / (1.0 + w) * np.exp(-t)


def _aptxgd_logpdf(y, w, e):
    f0 = _xgamma_cdf(y, w)
    return (np.log(_log_ratio(e)) + 2.0 * np.log(w) - np.log1p(w) + np.log1p(0.5 * w * y * y)
            - w * y + f0 * np.log(e))


def _aptxgd_cdf(y, w, e):
    f0 = _xgamma_cdf(y, w)
    r = e - 1.0
    small = np.abs(r) < 1e-8
    safe = np.where(small, 1.0, r)
    return np.where(small, f0 + 0.5 * r * f0 * (f0 - 1.0), np.expm1(f0 * np.log(e)) / safe)


def _power(y, a):
    # y**a through logs; callers guarantee y > 0
    with np.errstate(over="ignore"):
        return np.exp(a * np.log(y))


def _pld_logpdf(y, w, e):
    ly = np.log(y)
    with np.errstate(over="ignore"):
        z = _power(y, e)
        return np.log(e) + 2.0 * np.log(w) - np.log1p(w) + np.logaddexp(0.0, e * ly) + (e - 1.0) * ly - w * z


def _pld_cdf(y, w, e):
    with np.errstate(over="ignore", invalid="ignore"):
        z = w * _power(y, e)
        tail = np.where(np.isinf(z), 0.0, z / (1.0 + w) * np.exp(-z))
    return np.clip(-np.expm1(-z) - tail, 0.0, 1.0)


def _tpgld_logpdf(y, w, e, a):
    ly = np.log(y)
    with np.errstate(over="ignore"):
        z = w * _power(y, a)
        return (np.log(a) + 2.0 * np.log(w) + np.logaddexp(np.log(e), a * ly) + (a - 1.0) * ly
                - z - np.log1p(w * e))


def _tpgld_cdf(y, w, e, a):
    with np.errstate(over="ignore", invalid="ignore"):
        z = w * _power(y, a)
        tail = np.where(np.isinf(z), 0.0, z / (1.0 + w * e) * np.exp(-z))
    return np.clip(-np.expm1(-z) - tail, 0.0, 1.0)


def _cjd_logpdf(y, w):
    return 2.0 * np.log(w) - np.log(w + 2.0) + np.log1p(w * y * y) - w * y


def _cjd_cdf(y, w):
    t = w * y
    return np.clip(-np.expm1(-t) - t * (t + 2.0) / (w + 2.0) * np.exp(-t), 0.0, 1.0)


def _akd_logpdf(y, w):
    return 3.0 * np.log(w) - np.log(w * w + 2.0) + np.log1p(y * y) - w * y


def _akd_cdf(y, w):
    t = w * y
    return np.clip(-np.expm1(-t) - t * (t + 2.0) / (w * w + 2.0) * np.exp(-t), 0.0, 1.0)


_LOGPDF = {
    Family.SHIHA: shiha.log_pdf_kernel,
    Family.APTXGD: _aptxgd_logpdf,
    Family.PLD: _pld_logpdf,
    Family.TPGLD: _tpgld_logpdf,
    Family.CJD: _cjd_logpdf,
    Family.AKD: _akd_logpdf,
}

_CDF = {
    Family.SHIHA: shiha.cdf_kernel,
    Family.APTXGD: _aptxgd_cdf,
    Family.PLD: _pld_cdf,
    Family.TPGLD: _tpgld_cdf,
    Family.CJD: _cjd_cdf,
    Family.AKD: _akd_cdf,
}


def log_pdf_kernel(family: Family, y, *params):
    return _LOGPDF[family](y, *params)


def cdf_kernel(family: Family, y, *params):
    return _CDF[family](y, *params)


# --------------------------------------------------------------------------
# checked surface
# --------------------------------------------------------------------------

def _positive(y):
    arr = np.asarray(y, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0):
        raise DomainError("model evaluation requires y > 0")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def model_log_pdf(m: ModelSpec, y):
    with np.errstate(divide="ignore", invalid="ignore"):
        return _out(_LOGPDF[m.family](_positive(y), *m.params))


def model_pdf(m: ModelSpec, y):
    return _out(np.exp(model_log_pdf(m, y)))


def model_cdf(m: ModelSpec, y):
    with np.errstate(divide="ignore", invalid="ignore"):
        return _out(_CDF[m.family](_positive(y), *m.params))


def model_quantile(m: ModelSpec, prob: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Quantile by bracketed inversion of :func:`model_cdf`.

    Shiha models delegate to the dedicated solver in :mod:`shihadist.shiha`.
    """
    if not 0.0 < prob < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {prob}")
    if m.family is Family.SHIHA:
        return shiha.quantile(shiha.ShihaParams(*m.params), prob, tol)
    lo, hi = 1e-300, 1.0
    while model_cdf(m, hi) <= prob:
        hi *= 2.0
        if hi > 1e300:
            raise DomainError(f"cannot bracket the {prob} quantile of {m}")
    return find_root_bracketed(lambda y: model_cdf(m, y) - prob, lo, hi, tol)
