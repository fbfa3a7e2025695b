"""Command-line interface.

Every command prints one JSON envelope ``{artifact_version, command,
inputs, results}`` with sorted keys and floats written with six decimals
(``--full-precision`` writes shortest round-trip floats instead).
``--format csv`` writes the tabular part of ``results`` instead.

Exit codes: 0 success, 1 numerical or runtime failure (including a
``reproduce`` table that does not match), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .competitors import PARAM_NAMES, Family, ModelSpec, model_cdf, model_pdf
from .data import resolve_dataset
from .errors import BracketError, ConvergenceError, DataError, DomainError
from .estimation import fit_mle
from .gof import gof_report, qq_pp_points, summary_stats, ttt_points
from .reproduce import reproduce_table, table_passed
from .shiha import (
    ShihaParams,
    cdf,
    descriptors,
    entropy,
    hazard,
    hazard_peak,
    mgf,
    mixture_weights,
    pdf,
    quantile,
    raw_moment,
    sample_inverse,
    sample_mixture,
    stress_strength,
    survival,
)
from .simulation import TABLE_SAMPLE_SIZES, Sampler, StudyConfig, default_workers, run_study

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------

def _number(x: float, full: bool) -> str:
    if not math.isfinite(x):
        return "null"
    if full:
        return repr(float(x))
    text = f"{x:.6f}"
    return "0.000000" if text == "-0.000000" else text


def _to_json(obj, full: bool, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _number(float(obj), full)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_to_json(str(k), full)}: {_to_json(obj[k], full, indent + 1)}' for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_to_json(v, full, indent + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _to_json(v, full, indent + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_cell(v, full: bool) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(v) else _number(float(v), full)
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_cell(x, full) for x in v)
    if isinstance(v, dict):
        return ";".join(f"{k}={_csv_cell(v[k], full)}" for k in sorted(v))
    return str(v)


def _to_csv(results: dict, full: bool) -> str:
    rows = results.get("rows")
    if rows is None:
        rows = [{"key": k, "value": results[k]} for k in sorted(results)]
    buf = io.StringIO()
    if rows:
        header = list(rows[0])
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([_csv_cell(r.get(h), full) for h in header])
    return buf.getvalue()


# --------------------------------------------------------------------------
# argument helpers
# --------------------------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text: str) -> ShihaParams:
    vals = _floats(text)
    if len(vals) != 2:
        raise UsageError(f"expected 'omega,eta', got {text!r}")
    return ShihaParams(*vals)


def _grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("grid must be 'a:b:m'")
    try:
        a, b, m = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    if not (0 <= a < b) or m < 2:
        raise UsageError("grid needs 0 <= a < b and at least 2 points")
    return np.linspace(a, b, m)


def _families(text: str) -> list[Family]:
    if text.strip().lower() == "all":
        return list(Family)
    try:
        return [Family.parse(t) for t in text.split(",") if t.strip()]
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _params(args) -> ShihaParams:
    return ShihaParams(args.omega, args.eta)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

_EVAL = {"pdf": pdf, "cdf": cdf, "survival": survival, "hazard": hazard}


def cmd_eval(args) -> dict:
    p = _params(args)
    if (args.at is None) == (args.grid is None):
        raise UsageError("give exactly one of --at or --grid")
    y = np.array(_floats(args.at)) if args.at is not None else _grid(args.grid)
    if np.any(y < 0):
        raise UsageError("evaluation points must be >= 0")
    values = np.atleast_1d(_EVAL[args.what](p, y))
    out = {"rows": [{"y": float(a), "value": float(v)} for a, v in zip(y, values)]}
    if args.what == "hazard" and p.eta > 0:
        peak = hazard_peak(p)
        out["hazard_peak"] = {"y_star": peak.y_star, "h_max": peak.h_max}
    return out


def cmd_quantiles(args) -> dict:
    p = _params(args)
    probs = _floats(args.probs)
    if any(not 0 < q < 1 for q in probs):
        raise UsageError("probabilities must lie strictly inside (0, 1)")
    return {"rows": [{"prob": q, "quantile": quantile(p, q)} for q in probs]}


def cmd_moments(args) -> dict:
    p = _params(args)
    d = descriptors(p)
    w = mixture_weights(p)
    out = {
        "rows": [{"k": k, "raw_moment": raw_moment(p, k)} for k in range(1, args.order + 1)],
        "mean": d.mean, "variance": d.variance, "skewness": d.skewness,
        "kurtosis": d.kurtosis, "excess_kurtosis": d.excess_kurtosis,
        "mixture_weights": {"p1": w.p1, "p2": w.p2, "p3": w.p3},
    }
    if args.t is not None:
        out["mgf"] = {"t": args.t, "value": mgf(p, args.t)}
    return out


def cmd_entropy(args) -> dict:
    return {"entropy": entropy(_params(args))}


def cmd_reliability(args) -> dict:
    return {"R": stress_strength(_pair(args.strength), _pair(args.stress))}


def cmd_sample(args) -> dict:
    p = _params(args)
    if args.n < 1:
        raise UsageError("--n must be positive")
    draw = sample_inverse if args.method == "inverse" else sample_mixture
    y = draw(p, args.n, args.seed)
    return {"rows": [{"i": i + 1, "y": float(v)} for i, v in enumerate(y)]}


def cmd_simulate(args) -> dict:
    reps = 10000 if args.full else args.replications
    sizes = tuple(int(v) for v in _floats(args.sizes)) if args.sizes else TABLE_SAMPLE_SIZES
    cfg = StudyConfig(true_params=_params(args), sample_sizes=sizes, replications=reps,
                      seed=args.seed, sampler=Sampler(args.sampler), workers=_threads(args))
    rep = run_study(cfg)
    return {"replications": reps, "rows": rep.table()}


def cmd_ttt(args) -> dict:
    ds = resolve_dataset(args.data, args.column)
    pts = ttt_points(ds.values)
    return {"dataset": ds.name, "rows": [{"u": u, "t": t} for u, t in pts]}


def _fit_rows(ds, families):
    rows = []
    for fam in families:
        try:
            res = fit_mle(fam, ds.values)
            g = gof_report(res.model, ds.values)
        except (ConvergenceError, BracketError) as exc:
            rows.append({"family": fam.label, "error": str(exc)})
            continue
        rows.append({
            "family": fam.label, "params": res.model.as_dict(), "log_lik": res.log_lik,
            "aic": res.aic, "bic": res.bic, "ad": g.ad_stat, "ad_p": g.ad_p, "ks": g.ks_stat,
            "ks_p": g.ks_p, "converged": res.converged,
            "at_boundary": [n for n, b in zip(PARAM_NAMES[fam], res.at_boundary) if b],
        })
    ok = sorted((r for r in rows if "error" not in r), key=lambda r: r["aic"])
    for rank, r in enumerate(ok, 1):
        r["rank"] = rank
    return ok + [r for r in rows if "error" in r]


def cmd_fit(args) -> dict:
    ds = resolve_dataset(args.data, args.column)
    rows = _fit_rows(ds, _families(args.families))
    if all("error" in r for r in rows):
        raise ConvergenceError("every family failed to fit")
    return {"dataset": ds.name, "n": ds.n, "rows": rows}


def cmd_diag(args) -> dict:
    ds = resolve_dataset(args.data, args.column)
    fam = Family.parse(args.family)
    res = fit_mle(fam, ds.values)
    qq, pp, failed = qq_pp_points(res.model, ds.values)
    g = gof_report(res.model, ds.values)
    y = np.sort(np.array(ds.values))
    grid = np.linspace(y[0] / 2, y[-1] * 1.1, args.points)
    s = summary_stats(ds.values)
    return {
        "dataset": ds.name, "family": fam.label, "params": res.model.as_dict(),
        "ks": g.ks_stat, "ad": g.ad_stat,
        "summary": {k: getattr(s, k) for k in ("min", "q1", "median", "q3", "max", "mean",
                                                "variance", "skewness", "kurtosis")},
        "qq_failed": list(failed),
        "rows": [{"i": i + 1, "y": float(y[i]), "model_quantile": float(qq[i, 0]),
                  "position": float(pp[i, 0]), "fitted_cdf": float(pp[i, 1])} for i in range(y.size)],
        "curve": [{"y": float(t), "pdf": float(model_pdf(res.model, t)), "cdf": float(model_cdf(res.model, t))}
                  for t in grid],
    }


def cmd_reproduce(args) -> dict:
    kwargs = {}
    if args.table == 4:
        kwargs = {"replications": 10000 if args.full else args.replications, "seed": args.seed,
                  "workers": _threads(args)}
    checks = reproduce_table(args.table, **kwargs)
    binding = [c for c in checks if c.binding]
    return {
        "table": args.table,
        "passed": table_passed(checks),
        "binding_checks": len(binding),
        "binding_failures": sum(not c.passed for c in binding),
        "rows": [c.as_dict() for c in checks],
    }


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return args.threads
    return default_workers()


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_params(p):
    p.add_argument("--omega", type=float, required=True, help="rate parameter (> 0)")
    p.add_argument("--eta", type=float, required=True, help="shape weight (>= 0)")


def _add_data(p):
    p.add_argument("--data", required=True, help="built-in dataset name or CSV path")
    p.add_argument("--column", default=None, help="CSV column name or zero-based index")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiha", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")
    common.add_argument("--full-precision", action="store_true", help="write floats without rounding")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="pdf, cdf, survival or hazard values")
    _add_params(p)
    p.add_argument("--what", choices=sorted(_EVAL), default="pdf")
    p.add_argument("--at", default=None, help="comma-separated points")
    p.add_argument("--grid", default=None, help="a:b:m, m evenly spaced points on [a, b]")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("quantiles", parents=[common], help="quantiles at given probabilities")
    _add_params(p)
    p.add_argument("--probs", required=True)
    p.set_defaults(func=cmd_quantiles)

    p = sub.add_parser("moments", parents=[common], help="raw moments and shape descriptors")
    _add_params(p)
    p.add_argument("--order", type=int, default=4, choices=range(1, 11), metavar="K")
    p.add_argument("--t", type=float, default=None, help="also evaluate the mgf at t")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("entropy", parents=[common], help="Shannon entropy")
    _add_params(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("reliability", parents=[common], help="stress-strength reliability P(Y1 > Y2)")
    p.add_argument("--strength", required=True, help="omega,eta of the strength Y1")
    p.add_argument("--stress", required=True, help="omega,eta of the stress Y2")
    p.set_defaults(func=cmd_reliability)

    p = sub.add_parser("sample", parents=[common], help="draw random variates")
    _add_params(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--method", choices=("inverse", "mixture"), default="inverse")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("simulate", parents=[common], help="bias/MSE simulation study")
    _add_params(p)
    p.add_argument("--sizes", default=None, help="comma-separated sample sizes")
    p.add_argument("--replications", type=int, default=2000)
    p.add_argument("--full", action="store_true", help="use 10000 replications")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--sampler", choices=[s.value for s in Sampler], default="inverse")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", parents=[common], help="fit families and rank them by AIC")
    _add_data(p)
    p.add_argument("--families", default="all", help="'all' or a comma-separated list")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("ttt", parents=[common], help="scaled total-time-on-test curve")
    _add_data(p)
    p.set_defaults(func=cmd_ttt)

    p = sub.add_parser("diag", parents=[common], help="QQ, PP and fitted-curve plot data")
    _add_data(p)
    p.add_argument("--family", default="shiha")
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("reproduce", parents=[common], help="regenerate a reference table and diff it")
    p.add_argument("--table", type=int, required=True, choices=range(1, 10), metavar="N")
    p.add_argument("--replications", type=int, default=2000, help="table 4 only")
    p.add_argument("--full", action="store_true", help="table 4 with 10000 replications")
    p.add_argument("--seed", type=int, default=2024, help="table 4 only")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_reproduce)
    return parser


def _inputs(args) -> dict:
    skip = {"func", "format", "out", "full_precision"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        results = args.func(args)
        code = EXIT_OK
        if args.command == "reproduce" and not results["passed"]:
            code = EXIT_FAILURE
    except (UsageError, DomainError, DataError, KeyError, OSError) as exc:
        print(f"shiha: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, BracketError, ArithmeticError) as exc:
        print(f"shiha: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    if args.format == "csv":
        text = _to_csv(results, args.full_precision)
    else:
        envelope = {"artifact_version": __version__, "command": args.command,
                    "inputs": _inputs(args), "results": results}
        text = _to_json(envelope, args.full_precision) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
