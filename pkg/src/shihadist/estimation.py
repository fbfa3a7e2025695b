"""Maximum likelihood fitting for every family in :mod:`shihadist.competitors`.

The search is Nelder-Mead in log-parameter space with the box bounds of
:func:`~shihadist.competitors.param_bounds` applied after exponentiation.
Many simplices are advanced at once (one per start point, and one per
dataset when fitting a whole batch of samples), so a full multi-start fit
costs a handful of vectorised likelihood sweeps per iteration instead of
thousands of Python-level calls.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .competitors import PARAM_NAMES, Family, ModelSpec, log_pdf_kernel, param_bounds
from .errors import ConvergenceError, DataError, DomainError

__all__ = [
    "FitConfig",
    "FitResult",
    "log_likelihood",
    "information_criteria",
    "start_points",
    "fit_mle",
    "fit_mle_batch",
    "nelder_mead_batch",
]

_BAD = 1e300
_CHUNK = 1 << 20


@dataclass(frozen=True)
class FitConfig:
    """Optimiser settings.

    ``omega_factors`` jitter the anchor ``1/mean(data)`` for the first
    parameter; ``other_values`` seed every further parameter. One-parameter
    families use the wider ``single_factors`` grid so they too get at least
    eight starts. ``xtol`` is the simplex diameter in log-parameter units,
    i.e. a relative tolerance on the parameters.
    """

    omega_factors: tuple = (0.5, 1.0, 2.0)
    other_values: tuple = (0.1, 1.0, 10.0)
    single_factors: tuple = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
    xtol: float = 1e-8
    ftol: float = 1e-10
    max_iter: int = 4000
    initial_step: float = 0.5
    polish: bool = True


DEFAULT_CONFIG = FitConfig()


@dataclass(frozen=True)
class FitResult:
    model: ModelSpec
    log_lik: float
    aic: float
    bic: float
    n: int
    k: int
    converged: bool
    at_boundary: tuple
    start_log_liks: tuple = field(default=(), repr=False)

    @property
    def family(self) -> Family:
        return self.model.family

    @property
    def params(self) -> tuple:
        return self.model.params


def _check_data(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        raise DataError("data must be nonempty")
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise DataError("observations must be finite and strictly positive")
    return arr


def log_likelihood(m: ModelSpec, data) -> float:
    """Sum of log densities; ``-inf`` when any observation has zero density."""
    y = _check_data(data).ravel()
    with np.errstate(all="ignore"):
        lp = log_pdf_kernel(m.family, y, *m.params)
    total = math.fsum(lp)
    if not math.isfinite(total):
        return -math.inf
    return total


def information_criteria(log_lik: float, k: int, n: int) -> tuple[float, float]:
    """``(AIC, BIC) = (2k - 2 logL, k ln n - 2 logL)``."""
    if int(k) != k or k < 1 or int(n) != n or n < 1:
        raise DomainError("k and n must be positive integers")
    return 2.0 * k - 2.0 * log_lik, k * math.log(n) - 2.0 * log_lik


def start_points(family, data, config: FitConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Multi-start grid anchored at ``1/mean(data)``; one row per start."""
    fam = Family.parse(family)
    anchor = 1.0 / float(np.mean(data))
    k = len(PARAM_NAMES[fam])
    if k == 1:
        return np.array([[anchor * f] for f in config.single_factors])
    rows = [(anchor * f, *rest)
            for f in config.omega_factors
            for rest in itertools.product(config.other_values, repeat=k - 1)]
    return np.array(rows, dtype=float)


# --------------------------------------------------------------------------
# batched Nelder-Mead
# --------------------------------------------------------------------------

def nelder_mead_batch(objective, x0, lower, upper, *, step=0.5, xtol=1e-8, ftol=1e-10, max_iter=4000):
    """Minimise many independent problems with one Nelder-Mead simplex each.

    Parameters
    ----------
    objective : callable
        ``objective(rows, X)`` returns the objective for the problems
        indexed by ``rows`` evaluated at the points ``X`` (shape
        ``(len(rows), k)``). Non-finite values count as ``+inf``.
    x0 : ndarray, shape (m, k)
        Starting point of each problem.
    lower, upper : array_like, shape (k,)
        Box constraints; trial points are clipped into the box.

    Returns
    -------
    x : ndarray (m, k)
    f : ndarray (m,)
    converged : ndarray of bool (m,)
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    m, k = x0.shape
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)

    def clip(x):
        return np.minimum(np.maximum(x, lower), upper)

    def evaluate(rows, X):
        f = np.asarray(objective(rows, X), dtype=float)
        return np.where(np.isfinite(f), f, _BAD)

    # initial simplex: x0 plus one step along each axis (stepping inward at an upper bound)
    simplex = np.repeat(clip(x0)[:, None, :], k + 1, axis=1)
    for j in range(k):
        v = simplex[:, j + 1, j] + step
        simplex[:, j + 1, j] = np.where(v > upper[j], simplex[:, j + 1, j] - step, v)
    simplex = clip(simplex)
    all_rows = np.arange(m)
    fvals = evaluate(np.repeat(all_rows, k + 1), simplex.reshape(-1, k)).reshape(m, k + 1)

    converged = np.zeros(m, dtype=bool)
    active = all_rows.copy()
    for _ in range(max_iter):
        if active.size == 0:
            break
        S = simplex[active]
        F = fvals[active]
        order = np.argsort(F, axis=1, kind="stable")
        S = np.take_along_axis(S, order[:, :, None], axis=1)
        F = np.take_along_axis(F, order, axis=1)

        diam = np.max(np.abs(S[:, 1:, :] - S[:, :1, :]), axis=(1, 2))
        fspread = np.max(np.abs(F[:, 1:] - F[:, :1]), axis=1)
        done = (diam <= xtol) & (fspread <= ftol)
        if done.any():
            simplex[active] = S
            fvals[active] = F
            converged[active[done]] = True
            keep = ~done
            active, S, F = active[keep], S[keep], F[keep]
            if active.size == 0:
                break

        best, worst = S[:, 0, :], S[:, -1, :]
        fbest, fsecond, fworst = F[:, 0], F[:, -2], F[:, -1]
        centroid = S[:, :-1, :].mean(axis=1)

        xr = clip(2.0 * centroid - worst)
        fr = evaluate(active, xr)
        new_x = xr.copy()
        new_f = fr.copy()
        shrink = np.zeros(active.size, dtype=bool)

        expand = fr < fbest
        if expand.any():
            xe = clip(centroid[expand] + 2.0 * (xr[expand] - centroid[expand]))
            fe = evaluate(active[expand], xe)
            better = fe < fr[expand]
            idx = np.flatnonzero(expand)[better]
            new_x[idx] = xe[better]
            new_f[idx] = fe[better]

        outside = (fr >= fsecond) & (fr < fworst)
        if outside.any():
            xc = clip(centroid[outside] + 0.5 * (xr[outside] - centroid[outside]))
            fc = evaluate(active[outside], xc)
            ok = fc <= fr[outside]
            idx = np.flatnonzero(outside)
            new_x[idx[ok]] = xc[ok]
            new_f[idx[ok]] = fc[ok]
            shrink[idx[~ok]] = True

        inside = fr >= fworst
        if inside.any():
            xcc = clip(centroid[inside] + 0.5 * (worst[inside] - centroid[inside]))
            fcc = evaluate(active[inside], xcc)
            ok = fcc < fworst[inside]
            idx = np.flatnonzero(inside)
            new_x[idx[ok]] = xcc[ok]
            new_f[idx[ok]] = fcc[ok]
            shrink[idx[~ok]] = True

        S[:, -1, :] = new_x
        F[:, -1] = new_f
        if shrink.any():
            Ss = S[shrink]
            Ss[:, 1:, :] = clip(Ss[:, :1, :] + 0.5 * (Ss[:, 1:, :] - Ss[:, :1, :]))
            rows = np.repeat(active[shrink], k)
            Fs = evaluate(rows, Ss[:, 1:, :].reshape(-1, k)).reshape(-1, k)
            S[shrink] = Ss
            F[shrink, 1:] = Fs
        simplex[active] = S
        fvals[active] = F

    ibest = np.argmin(fvals, axis=1)
    x = simplex[all_rows, ibest]
    f = fvals[all_rows, ibest]
    return x, f, converged


# --------------------------------------------------------------------------
# fitting
# --------------------------------------------------------------------------

def _to_params(u, lo, hi, log_lo, log_hi):
    # snap clipped coordinates to the exact bound values
    return np.where(u <= log_lo, lo, np.where(u >= log_hi, hi, np.exp(u)))


def _batch_objective(family, data, owner, lo, hi, log_lo, log_hi):
    n = data.shape[1]
    per_chunk = max(1, _CHUNK // n)

    def objective(rows, U):
        params = _to_params(U, lo, hi, log_lo, log_hi)
        ds = owner[rows]
        out = np.empty(len(rows))
        with np.errstate(all="ignore"):
            for s in range(0, len(rows), per_chunk):
                sl = slice(s, s + per_chunk)
                cols = [params[sl, j:j + 1] for j in range(params.shape[1])]
                y = data[ds[sl]] if data.shape[0] > 1 else data
                out[sl] = -log_pdf_kernel(family, y, *cols).sum(axis=1)
        return out

    return objective


def fit_mle_batch(family, datasets, config: FitConfig = DEFAULT_CONFIG, starts=None) -> list[FitResult]:
    """Fit ``family`` independently to every row of ``datasets``.

    ``datasets`` has shape ``(r, n)``: ``r`` samples of equal size. All
    start points of all samples run as one batch of simplices. ``starts``
    overrides the default grid with explicit parameter rows used for every
    sample.

    Raises
    ------
    ConvergenceError
        If, for some sample, every start ends at a non-finite likelihood.
        The exception's ``partial`` holds the results computed so far.
    """
    fam = Family.parse(family)
    data = _check_data(datasets)
    if data.ndim == 1:
        data = data[None, :]
    r, n = data.shape
    k = len(PARAM_NAMES[fam])
    bounds = np.array(param_bounds(fam))
    lo, hi = bounds[:, 0], bounds[:, 1]
    log_lo, log_hi = np.log(lo), np.log(hi)

    if starts is None:
        start_sets = [start_points(fam, row, config) for row in data]
    else:
        s = np.atleast_2d(np.asarray(starts, dtype=float))
        start_sets = [s] * r
    n_starts = np.array([len(s) for s in start_sets])
    owner = np.repeat(np.arange(r), n_starts)
    x0 = np.log(np.clip(np.concatenate(start_sets), lo, hi))

    objective = _batch_objective(fam, data, owner, lo, hi, log_lo, log_hi)
    f0 = objective(np.arange(len(owner)), x0)
    run = dict(step=config.initial_step, xtol=config.xtol, ftol=config.ftol, max_iter=config.max_iter)
    x, f, conv = nelder_mead_batch(objective, x0, log_lo, log_hi, **run)
    if config.polish:
        # restart from each end point; a collapsed simplex gets a fresh shape
        x2, f2, conv2 = nelder_mead_batch(objective, x, log_lo, log_hi, **run)
        take = f2 <= f
        x = np.where(take[:, None], x2, x)
        f = np.where(take, f2, f)
        conv = np.where(take, conv2, conv)

    params_all = _to_params(x, lo, hi, log_lo, log_hi)
    results = []
    failed = []
    bounds_list = [tuple(b) for b in bounds]
    for i in range(r):
        idx = np.flatnonzero(owner == i)
        cand = [(f[j], tuple(params_all[j]), j) for j in idx if f[j] < _BAD]
        if not cand:
            failed.append(i)
            results.append(None)
            continue
        # largest likelihood first, then the lexicographically smallest vector
        fbest, pbest, jbest = min(cand, key=lambda c: (c[0], c[1]))
        model = ModelSpec(fam, pbest)
        ll = log_likelihood(model, data[i])
        aic, bic = information_criteria(ll, k, n)
        at_bound = tuple(bool(abs(v - b_lo) <= 1e-6 * b_lo or abs(v - b_hi) <= 1e-6 * b_hi)
                         for v, (b_lo, b_hi) in zip(pbest, bounds_list))
        starts_ll = tuple(float(-v) if v < _BAD else -math.inf for v in f0[idx])
        results.append(FitResult(model=model, log_lik=ll, aic=aic, bic=bic, n=n, k=k,
                                 converged=bool(conv[jbest]), at_boundary=at_bound,
                                 start_log_liks=starts_ll))
    if failed:
        raise ConvergenceError(f"all starts failed for {len(failed)} sample(s) (first: {failed[0]})",
                               partial=results)
    return results


def fit_mle(family, data, config: FitConfig = DEFAULT_CONFIG, starts=None) -> FitResult:
    """Maximum likelihood fit of one family to one sample.

    Examples
    --------
    >>> from shihadist.data import builtin_dataset
    >>> res = fit_mle("shiha", builtin_dataset("vinyl_chloride").values)
    >>> round(res.params[0], 3), res.params[1], res.at_boundary
    (0.532, 0.0001, (False, True))
    """
    y = _check_data(data).ravel()
    return fit_mle_batch(family, y[None, :], config, starts)[0]
