"""Regenerate the reference tables and compare them cell by cell.

Each ``table_N`` function returns a list of :class:`Check` records. A
check is *binding* when it belongs to the pass/fail contract of the table;
advisory checks are reported but never fail a table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import reference as ref
from .competitors import Family
from .data import builtin_dataset
from .estimation import fit_mle
from .gof import gof_report, summary_stats
from .shiha import ShihaParams, descriptors, quantile, raw_moment
from .simulation import StudyConfig, TABLE_DESIGNS, run_study

__all__ = ["Check", "TABLES", "reproduce_table", "fit_table_rows", "table_passed"]

QUANTILE_TOL = 5e-4
MOMENT_TOL = 5e-3
SUMMARY_TOL = 0.01
FIT_PARAM_RTOL = 1e-3
FIT_IC_TOL = 0.05
KS_TOL, KS_P_TOL = 1e-3, 0.02
AD_TOL, AD_P_TOL = 0.05, 0.03
SIM_SIGMAS = 3.0


@dataclass(frozen=True)
class Check:
    item: str
    value: float
    expected: float
    tol: float
    passed: bool
    binding: bool = True

    def as_dict(self) -> dict:
        return {"item": self.item, "value": self.value, "expected": self.expected,
                "tol": self.tol, "passed": self.passed, "binding": self.binding}


def _abs_check(item, value, expected, tol, binding=True) -> Check:
    return Check(item, float(value), float(expected), tol, bool(abs(value - expected) <= tol), binding)


def table_passed(checks) -> bool:
    return all(c.passed for c in checks if c.binding)


def table_1() -> list[Check]:
    out = []
    probs = np.array(ref.QUANTILE_PROBS)
    for j, (w, e) in enumerate(ref.QUANTILE_PARAMS):
        q = quantile(ShihaParams(w, e), probs)
        for i, prob in enumerate(ref.QUANTILE_PROBS):
            out.append(_abs_check(f"q({prob}; {w}, {e})", q[i], ref.QUANTILES[i][j], QUANTILE_TOL))
    return out


def table_2() -> list[Check]:
    out = []
    for w, row in ref.MOMENTS.items():
        for b, e in enumerate(ref.MOMENT_ETAS):
            p = ShihaParams(w, e)
            for k in range(1, 5):
                out.append(_abs_check(f"mu{k}({w}, {e})", raw_moment(p, k), row[4 * b + k - 1], MOMENT_TOL))
    return out


def table_3() -> list[Check]:
    out = []
    for w, row in ref.SHAPES.items():
        for b, e in enumerate(ref.SHAPE_ETAS):
            d = descriptors(ShihaParams(w, e))
            for name, v, expected in zip(("var", "skew", "kurt"), (d.variance, d.skewness, d.kurtosis),
                                         row[3 * b:3 * b + 3]):
                out.append(_abs_check(f"{name}({w}, {e})", v, expected, MOMENT_TOL))
    for e in ref.SHAPE_ETAS:
        d = descriptors(ShihaParams(1e6, e))
        out.append(_abs_check(f"skew(1e6, {e})", d.skewness, 2.0, 1e-3))
        out.append(_abs_check(f"kurt(1e6, {e})", d.kurtosis, 9.0, 1e-2))
    return out


def table_4(replications: int = 2000, seed: int = 2024, workers: int = 1) -> list[Check]:
    """Simulation study against the reference bias/MSE values.

    Bias and MSE are compared for the (0.5, 0.5) and (1, 1) designs within
    three combined Monte Carlo standard errors. The reference standard
    error is not printed; it is taken as ours scaled to its replication
    count, ``se * sqrt(replications / 10000)``. For all eight designs the
    MSE of both parameters must fall from the smallest to the largest n.
    """
    out = []
    scale = math.sqrt(replications / ref.SIM_REPLICATIONS)
    compared = {(0.5, 0.5), (1.0, 1.0)}
    for p in TABLE_DESIGNS:
        key = (p.omega, p.eta)
        rep = run_study(StudyConfig(true_params=p, replications=replications, seed=seed, workers=workers))
        expected_rows = ref.SIMULATION[key]
        for i, n in enumerate(ref.SIM_SAMPLE_SIZES):
            pub = dict(zip(("bias_omega", "bias_eta", "mse_omega", "mse_eta"), expected_rows[i]))
            for name in ("omega", "eta"):
                s = rep.get(n, name)
                for kind, value, se in (("bias", s.bias, s.bias_se), ("mse", s.mse, s.mse_se)):
                    tol = SIM_SIGMAS * se * math.sqrt(1.0 + scale**2)
                    note = " [reference row printed as n=400]" if (key, n) in ref.SIM_RELABELLED else ""
                    out.append(_abs_check(f"{kind}_{name}(n={n}; {p.omega}, {p.eta}){note}", value,
                                          pub[f"{kind}_{name}"], tol, binding=key in compared))
        first, last = ref.SIM_SAMPLE_SIZES[0], ref.SIM_SAMPLE_SIZES[-1]
        for name in ("omega", "eta"):
            lo, hi = rep.get(last, name).mse, rep.get(first, name).mse
            out.append(Check(f"mse_{name} falls n={first}->{last} ({p.omega}, {p.eta})",
                             lo, hi, 0.0, bool(lo < hi)))
    return out


def table_5() -> list[Check]:
    out = []
    names = ("min", "q1", "median", "q3", "max", "mean", "variance")
    for ds, expected in ref.SUMMARIES.items():
        s = summary_stats(builtin_dataset(ds).values)
        for name, e in zip(names, expected):
            out.append(_abs_check(f"{name}[{ds}]", getattr(s, name), e, SUMMARY_TOL))
        out.append(_abs_check(f"skewness[{ds}]", s.skewness, expected[7], 5e-3, binding=False))
        # the reference kurtosis column is the moment ratio plus 3
        out.append(_abs_check(f"kurtosis+3[{ds}]", s.kurtosis + 3.0, expected[8], 5e-3, binding=False))
    return out


def fit_table_rows(dataset: str, families=tuple(Family)) -> list[dict]:
    """Fit every family to ``dataset``; rows sorted by AIC."""
    y = builtin_dataset(dataset).values
    rows = []
    for fam in families:
        fam = Family.parse(fam)
        res = fit_mle(fam, y)
        g = gof_report(res.model, y)
        rows.append({"family": fam, "fit": res, "gof": g})
    rows.sort(key=lambda r: r["fit"].aic)
    return rows


def fit_table(number: int) -> list[Check]:
    dataset, expected = ref.FITS[number]
    rows = fit_table_rows(dataset)
    out = []
    for row in rows:
        fam = row["family"]
        res, g = row["fit"], row["gof"]
        params, aic, bic, ad, ad_p, ks, ks_p = expected[fam.value]
        tag = f"{fam.label}[{dataset}]"
        if fam is Family.SHIHA:
            for name, v, e in zip(("omega", "eta"), res.params, params):
                tol = FIT_PARAM_RTOL * abs(e)
                out.append(_abs_check(f"{tag} {name}", v, e, tol))
        out.append(_abs_check(f"{tag} AIC", res.aic, aic, FIT_IC_TOL))
        out.append(_abs_check(f"{tag} BIC", res.bic, bic, FIT_IC_TOL))
        out.append(_abs_check(f"{tag} A-D", g.ad_stat, ad, AD_TOL))
        out.append(_abs_check(f"{tag} A-D p", g.ad_p, ad_p, AD_P_TOL))
        out.append(_abs_check(f"{tag} K-S", g.ks_stat, ks, KS_TOL))
        out.append(_abs_check(f"{tag} K-S p", g.ks_p, ks_p, KS_P_TOL))
    best = rows[0]["family"]
    out.append(Check(f"Shiha ranks first by AIC[{dataset}]", rows[0]["fit"].aic, rows[0]["fit"].aic,
                     0.0, best is Family.SHIHA))
    return out


TABLES = {1: table_1, 2: table_2, 3: table_3, 4: table_4, 5: table_5,
          **{n: (lambda n=n: fit_table(n)) for n in ref.FIT_TABLES}}


def reproduce_table(number: int, **kwargs) -> list[Check]:
    if number not in TABLES:
        raise KeyError(f"no table {number}; choose from {sorted(TABLES)}")
    return TABLES[number](**kwargs)
