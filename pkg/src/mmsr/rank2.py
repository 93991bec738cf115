"""Rank-two trimmed alternating least squares (the two-coin extension).

Row i scores each observed column by ``X_ij / ||v_j||`` and trims against its
own norm ``||u_i||``; the surviving columns determine ``u_i`` by a 2x2 least
squares solve.  Columns follow with the fresh rows.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, NumericalError
from .solver import DEFAULT_MAX_ITER, DEFAULT_TOL, FactorPair, ObservedMatrix, SolveReport, keep_mask, layout

RIDGE = 1e-12


def _solve_side(side, X_vals, other_factors, own, F, report):
    """Trimmed least-squares update for every vertex on one side."""
    norms = np.linalg.norm(other_factors, axis=1)
    nbr = other_factors[side.other]
    nbr_norm = norms[side.other]
    if np.any(nbr_norm == 0):
        raise NumericalError("zero factor row encountered during rank-2 trim")
    keep = keep_mask(side, X_vals / nbr_norm, np.linalg.norm(own, axis=1), F)
    w = keep.astype(float)
    size = side.size
    g = side.group
    counts = np.bincount(g, w, size)

    # least squares by modified Gram-Schmidt on the kept rows; forming the
    # 2x2 normal equations instead squares the condition number
    a = w * nbr[:, 0]
    b = w * nbr[:, 1]
    x = w * X_vals
    r00 = np.sqrt(np.bincount(g, a * a, size))
    q0 = a / np.where(r00 > 0, r00, 1.0)[g]
    r01 = np.bincount(g, q0 * b, size)
    b = b - r01[g] * q0
    r11 = np.sqrt(np.bincount(g, b * b, size))
    q1 = b / np.where(r11 > 0, r11, 1.0)[g]
    y0 = np.bincount(g, q0 * x, size)
    x = x - y0[g] * q0
    y1 = np.bincount(g, q1 * x, size)

    trace = r00**2 + r01**2 + r11**2
    weak = (r00 * r11) ** 2 <= RIDGE * trace**2
    new = own.copy()
    ok = (counts > 0) & ~weak
    c1 = y1[ok] / r11[ok]
    new[ok, 1] = c1
    new[ok, 0] = (y0[ok] - r01[ok] * c1) / r00[ok]

    # nearly collinear neighbors: ridge-regularized normal equations
    g00 = np.bincount(g, w * nbr[:, 0] ** 2, size)
    g01 = np.bincount(g, w * nbr[:, 0] * nbr[:, 1], size)
    g11 = np.bincount(g, w * nbr[:, 1] ** 2, size)
    rr0 = np.bincount(g, w * X_vals * nbr[:, 0], size)
    rr1 = np.bincount(g, w * X_vals * nbr[:, 1], size)
    lam = RIDGE * trace
    det = (g00 + lam) * (g11 + lam) - g01**2
    fix = (counts > 0) & weak & (det > 0)
    new[fix, 0] = ((g11 + lam)[fix] * rr0[fix] - g01[fix] * rr1[fix]) / det[fix]
    new[fix, 1] = ((g00 + lam)[fix] * rr1[fix] - g01[fix] * rr0[fix]) / det[fix]
    if report is not None:
        report.over_trimmed += int(np.count_nonzero((side.degree > 0) & (counts == 0)))
        report.single_retained += int(np.count_nonzero(weak & (counts > 0)))
    return new


def _check(X: ObservedMatrix, u, v):
    if u.shape != (X.m, 2) or v.shape != (X.n, 2):
        raise InputError(f"rank-2 factors must be {X.m}x2 and {X.n}x2, got {u.shape}, {v.shape}")


def mmsr2_sweep(X: ObservedMatrix, state: FactorPair, F: int, report: SolveReport | None = None):
    u = np.asarray(state.u, float)
    v = np.asarray(state.v, float)
    _check(X, u, v)
    by_row, by_col = layout(X)
    u_new = _solve_side(by_row, X.vals, v, u, F, report)
    v_new = _solve_side(by_col, X.vals[by_col.perm], u_new, v, F, report)
    return FactorPair(u_new, v_new)


def residual(X: ObservedMatrix, state: FactorPair, mask=None) -> float:
    """Sum of squared errors ``(u_i . v_j - X_ij)^2`` over observed entries."""
    pred = np.einsum("ek,ek->e", state.u[X.rows], state.v[X.cols])
    r = (pred - X.vals) ** 2
    if mask is not None:
        r = r[mask]
    return float(r.sum())


def run_mmsr2(
    X: ObservedMatrix,
    F: int,
    state: FactorPair | None = None,
    *,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    seed=0,
):
    """Iterate rank-2 sweeps from ``state`` (random when omitted) until stable.

    Rows with fewer than two retained neighbors are solved with a small ridge
    term and counted in ``report.single_retained``.
    """
    if state is None:
        rng = np.random.default_rng(seed)
        state = FactorPair(rng.uniform(0.5, 1.5, (X.m, 2)), rng.uniform(0.5, 1.5, (X.n, 2)))
    report = SolveReport()
    cur = state.copy()
    while report.iterations < max_iter:
        nxt = mmsr2_sweep(X, cur, F, report)
        if not (np.all(np.isfinite(nxt.u)) and np.all(np.isfinite(nxt.v))):
            raise NumericalError(f"nonfinite rank-2 factor at sweep {report.iterations + 1}")
        before = cur.reconstruction()
        after = nxt.reconstruction()
        scale = max(np.abs(before).max(), 1e-300)
        change = float(np.abs(after - before).max() / scale)
        cur = nxt
        report.iterations += 1
        report.final_change = change
        if change <= tol:
            report.converged = True
            break
    return cur, report
