"""Rank-one M-MSR: trimmed alternating ratio averaging.

Each row value ``u_i`` is replaced by the mean of the ratios ``X_ij / v_j`` over
its observed columns, after discarding up to ``F`` ratios strictly above and up
to ``F`` strictly below the current ``u_i``.  Columns then do the same with the
fresh row values.  Corrupted rows/columns that are F-local cannot drag normal
vertices outside the range spanned by normal values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import InputError, MMSRError, NumericalError
from .graph import BipartiteGraph, CorruptionSet, build_graph

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


class OverTrimmed(MMSRError):
    """Trimming removed every candidate value for a vertex."""


@dataclass(frozen=True)
class ObservedMatrix:
    """Revealed entries of an ``m x n`` matrix, stored sorted by (row, col)."""

    m: int
    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @classmethod
    def from_entries(cls, m: int, n: int, entries: Mapping[tuple[int, int], float]):
        keys = list(entries)
        for i, j in keys:
            if not (0 <= i < m and 0 <= j < n):
                raise InputError(f"entry {(i, j)} out of range for a {m}x{n} matrix")
        rows = np.array([k[0] for k in keys], dtype=np.int64)
        cols = np.array([k[1] for k in keys], dtype=np.int64)
        vals = np.array([float(entries[k]) for k in keys], dtype=float)
        return cls._sorted(m, n, rows, cols, vals)

    @classmethod
    def from_dense(cls, X, mask=None):
        X = np.asarray(X, dtype=float)
        m, n = X.shape
        if mask is None:
            mask = np.ones_like(X, dtype=bool)
        rows, cols = np.nonzero(mask)
        return cls(m, n, rows.astype(np.int64), cols.astype(np.int64), X[rows, cols].copy())

    @classmethod
    def _sorted(cls, m, n, rows, cols, vals):
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if rows.size > 1:
            dup = (np.diff(rows) == 0) & (np.diff(cols) == 0)
            if dup.any():
                k = int(np.flatnonzero(dup)[0])
                raise InputError(f"duplicate entry {(int(rows[k]), int(cols[k]))}")
        return cls(m, n, rows, cols, vals)

    @property
    def entries(self) -> dict[tuple[int, int], float]:
        return {
            (int(i), int(j)): float(x) for i, j, x in zip(self.rows, self.cols, self.vals)
        }

    @property
    def graph(self) -> BipartiteGraph:
        return build_graph(self.m, self.n, zip(self.rows.tolist(), self.cols.tolist()))

    def dense(self, fill=np.nan) -> np.ndarray:
        out = np.full((self.m, self.n), fill, dtype=float)
        out[self.rows, self.cols] = self.vals
        return out

    def with_values(self, vals) -> "ObservedMatrix":
        return ObservedMatrix(self.m, self.n, self.rows, self.cols, np.asarray(vals, float))

    def check_positive(self) -> None:
        bad = np.flatnonzero(~(self.vals > 0))
        if bad.size:
            k = int(bad[0])
            raise NumericalError(
                f"entry ({int(self.rows[k])}, {int(self.cols[k])}) = {float(self.vals[k])!r} "
                "is not strictly positive"
            )


@dataclass
class FactorPair:
    u: np.ndarray
    v: np.ndarray

    def copy(self) -> "FactorPair":
        return FactorPair(self.u.copy(), self.v.copy())

    def reconstruction(self) -> np.ndarray:
        if self.u.ndim == 1:
            return np.outer(self.u, self.v)
        return self.u @ self.v.T


@dataclass
class GroundTruth:
    """True positive factors plus which vertices are uncorrupted."""

    a: np.ndarray
    b: np.ndarray
    normal_left: np.ndarray | None = None
    normal_right: np.ndarray | None = None

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if not (np.all(self.a > 0) and np.all(self.b > 0)):
            raise InputError("ground-truth factors must be strictly positive")
        if self.normal_left is None:
            self.normal_left = np.ones(self.a.size, dtype=bool)
        if self.normal_right is None:
            self.normal_right = np.ones(self.b.size, dtype=bool)
        self.normal_left = np.asarray(self.normal_left, dtype=bool)
        self.normal_right = np.asarray(self.normal_right, dtype=bool)

    @classmethod
    def with_corruption(cls, a, b, corrupted: CorruptionSet) -> "GroundTruth":
        nl = np.ones(len(a), dtype=bool)
        nr = np.ones(len(b), dtype=bool)
        nl[list(corrupted.left)] = False
        nr[list(corrupted.right)] = False
        return cls(a, b, nl, nr)


@dataclass
class SolveReport:
    iterations: int = 0
    converged: bool = False
    final_change: float = math.inf
    history: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    over_trimmed: int = 0
    single_retained: int = 0


def trim_filter(values: Sequence[tuple[int, float]], own: float, F: int):
    """Drop the up-to-F most extreme values on each side of ``own``.

    Only values strictly above (below) ``own`` are candidates for the upper
    (lower) cut.  At a cut, equal values are dropped smaller neighbor id
    first.  Survivors keep their input order.
    """
    if F < 0:
        raise InputError(f"F must be nonnegative, got {F}")
    above = sorted((x for x in values if x[1] > own), key=lambda e: (-e[1], e[0]))
    below = sorted((x for x in values if x[1] < own), key=lambda e: (e[1], e[0]))
    drop = {e[0] for e in above[:F]} | {e[0] for e in below[:F]}
    kept = [e for e in values if e[0] not in drop]
    if not kept:
        raise OverTrimmed(f"all {len(values)} values trimmed around {own!r} with F={F}")
    return kept


class Side:
    """Edges grouped by one side's vertex, for vectorized half-sweeps."""

    def __init__(self, group, other, perm, size):
        self.group = group
        self.other = other
        self.perm = perm
        self.size = size
        self.degree = np.bincount(group, minlength=size)


def layout(X: ObservedMatrix):
    by_row = Side(X.rows, X.cols, np.arange(X.rows.size), X.m)
    perm = np.lexsort((X.rows, X.cols))
    by_col = Side(X.cols[perm], X.rows[perm], perm, X.n)
    return by_row, by_col


def keep_mask(side: Side, values: np.ndarray, own: np.ndarray, F: int) -> np.ndarray:
    """Boolean mask (aligned with ``values``) of entries surviving the trim."""
    E = values.size
    if F == 0 or E == 0:
        return np.ones(E, dtype=bool)
    ref = own[side.group]
    gt = values > ref
    lt = values < ref
    tiebreak = np.where(gt, -side.other, side.other)
    order = np.lexsort((tiebreak, values, side.group))
    g_sorted = side.group[order]
    starts = np.concatenate(([0], np.cumsum(side.degree)[:-1]))
    pos = np.arange(E) - starts[g_sorted]
    n_lt = np.bincount(side.group, weights=lt, minlength=side.size).astype(np.int64)
    n_gt = np.bincount(side.group, weights=gt, minlength=side.size).astype(np.int64)
    cut_lo = np.minimum(F, n_lt)[g_sorted]
    cut_hi = np.minimum(F, n_gt)[g_sorted]
    deg = side.degree[g_sorted]
    keep_sorted = (pos >= cut_lo) & (pos < deg - cut_hi)
    keep = np.empty(E, dtype=bool)
    keep[order] = keep_sorted
    return keep


def _trimmed_average(side, values, own, F, frozen, report):
    keep = keep_mask(side, values, own, F)
    sums = np.bincount(side.group, weights=np.where(keep, values, 0.0), minlength=side.size)
    counts = np.bincount(side.group, weights=keep, minlength=side.size)
    new = own.copy()
    ok = counts > 0
    if frozen is not None:
        ok &= ~frozen
    new[ok] = sums[ok] / counts[ok]
    if report is not None:
        live = side.degree > 0
        if frozen is not None:
            live &= ~frozen
        report.over_trimmed += int(np.count_nonzero(live & (counts == 0)))
        report.single_retained += int(np.count_nonzero(live & (counts == 1)))
    return new


def _half_sweeps(X, layout, u, v, F, frozen_l, frozen_r, report):
    by_row, by_col = layout
    ratios = X.vals / v[X.cols]
    u_new = _trimmed_average(by_row, ratios, u, F, frozen_l, report)
    ratios = X.vals[by_col.perm] / u_new[by_col.other]
    v_new = _trimmed_average(by_col, ratios, v, F, frozen_r, report)
    return u_new, v_new


def _check_state(X: ObservedMatrix, u, v):
    if u.shape != (X.m,) or v.shape != (X.n,):
        raise InputError(f"factor shapes {u.shape}, {v.shape} do not match {X.m}x{X.n}")
    if not np.all(v > 0):
        raise NumericalError(f"column factor has nonpositive entry at {int(np.argmin(v > 0))}")


def mmsr_sweep(X: ObservedMatrix, state: FactorPair, F: int) -> FactorPair:
    """One full M-MSR iteration: every row update, then every column update."""
    X.check_positive()
    u = np.asarray(state.u, dtype=float)
    v = np.asarray(state.v, dtype=float)
    _check_state(X, u, v)
    u_new, v_new = _half_sweeps(X, layout(X), u, v, F, None, None, None)
    return FactorPair(u_new, v_new)


def initial_row_values(X: ObservedMatrix, v0: np.ndarray) -> np.ndarray:
    """Median of each row's ratios ``X_ij / v0_j``; the trim reference for t=0.

    Rows with no observations get 1.
    """
    ratios = X.vals / v0[X.cols]
    u0 = np.ones(X.m)
    order = np.lexsort((ratios, X.rows))
    r_sorted, x_sorted = X.rows[order], ratios[order]
    deg = np.bincount(X.rows, minlength=X.m)
    starts = np.concatenate(([0], np.cumsum(deg)[:-1]))
    has = deg > 0
    lo = starts[has] + (deg[has] - 1) // 2
    hi = starts[has] + deg[has] // 2
    u0[has] = 0.5 * (x_sorted[lo] + x_sorted[hi])
    return u0


def normal_envelope(state: FactorPair, truth: GroundTruth) -> tuple[float, float]:
    """(min, max) over normal vertices of ``u_i / a_i`` and ``b_j / v_j``."""
    k = np.concatenate(
        (
            state.u[truth.normal_left] / truth.a[truth.normal_left],
            truth.b[truth.normal_right] / state.v[truth.normal_right],
        )
    )
    return float(k.min()), float(k.max())


skew_bounds = normal_envelope


def reconstruct_error(state: FactorPair, truth: GroundTruth, restrict_normal: bool = False) -> float:
    """Relative Frobenius distance between ``u v^T`` and ``a b^T``."""
    u, v, a, b = state.u, state.v, truth.a, truth.b
    if u.shape != a.shape or v.shape != b.shape:
        raise InputError("factor and ground-truth dimensions differ")
    if restrict_normal:
        u, a = u[truth.normal_left], a[truth.normal_left]
        v, b = v[truth.normal_right], b[truth.normal_right]
    target = np.outer(a, b)
    norm = np.linalg.norm(target)
    if norm == 0:
        raise InputError("ground truth has zero norm on the selected block")
    return float(np.linalg.norm(np.outer(u, v) - target) / norm)


def init_row_completion(X: ObservedMatrix, row: int, fill: float = 1.0, seed=0) -> np.ndarray:
    """Start vector from one observed row, gaps filled with random positives in (0, fill]."""
    if not 0 <= row < X.m:
        raise InputError(f"row {row} out of range for {X.m} rows")
    if fill <= 0:
        raise InputError(f"fill must be positive, got {fill}")
    sel = X.rows == row
    if not sel.any():
        raise InputError(f"row {row} has no observed entries")
    rng = np.random.default_rng(seed)
    v0 = fill * (1.0 - rng.random(X.n))
    v0[X.cols[sel]] = X.vals[sel]
    if not np.all(v0 > 0):
        raise NumericalError(f"row {row} has a nonpositive observed entry")
    return v0


def _frozen_masks(frozen: CorruptionSet | None, m: int, n: int):
    if frozen is None:
        return None, None
    fl = np.zeros(m, dtype=bool)
    fr = np.zeros(n, dtype=bool)
    fl[list(frozen.left)] = True
    fr[list(frozen.right)] = True
    return fl, fr


def run_mmsr(
    X: ObservedMatrix,
    F: int,
    v0=None,
    *,
    u0=None,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    truth: GroundTruth | None = None,
    frozen: CorruptionSet | None = None,
    record_history: bool = False,
) -> tuple[FactorPair, SolveReport]:
    """Iterate M-MSR sweeps until the largest relative coordinate change is <= tol.

    Parameters
    ----------
    X : ObservedMatrix
        Strictly positive observed entries.
    F : int
        Number of values trimmed on each side at every vertex.
    v0 : array, optional
        Positive starting column factor; all ones when omitted.
    u0 : array, optional
        Row values used as trim references in the first sweep.  Defaults to
        the per-row median ratio against ``v0``.
    truth : GroundTruth, optional
        Enables the normal-vertex envelope in ``history``.
    frozen : CorruptionSet, optional
        Vertices whose values are never updated.  Models an adaptive
        adversary that always reports a fixed value to its neighbors.
    """
    if tol <= 0:
        raise InputError(f"tol must be positive, got {tol}")
    if F < 0:
        raise InputError(f"F must be nonnegative, got {F}")
    X.check_positive()
    v = np.ones(X.n) if v0 is None else np.array(v0, dtype=float)
    if v.shape != (X.n,) or not np.all(v > 0):
        raise NumericalError("v0 must be a strictly positive vector of length n")
    u = initial_row_values(X, v) if u0 is None else np.array(u0, dtype=float)
    _check_state(X, u, v)

    report = SolveReport()
    if X.m + X.n > 1 and n_components(X) > 1:
        report.warnings.append(
            "observation graph is disconnected; components converge independently"
        )
    sides = layout(X)
    low = np.count_nonzero(sides[0].degree <= 2 * F) + np.count_nonzero(sides[1].degree <= 2 * F)
    if F > 0 and low:
        report.warnings.append(f"{low} vertices have degree <= 2F; trimming may exhaust them")
    fl, fr = _frozen_masks(frozen, X.m, X.n)

    def record(change):
        entry = {"iteration": report.iterations, "max_change": change}
        if truth is not None:
            entry["min_k"], entry["max_k"] = normal_envelope(FactorPair(u, v), truth)
        report.history.append(entry)

    if record_history:
        record(math.nan)
    while report.iterations < max_iter:
        u_new, v_new = _half_sweeps(X, sides, u, v, F, fl, fr, report)
        if not (np.all(np.isfinite(u_new)) and np.all(v_new > 0) and np.all(np.isfinite(v_new))):
            raise NumericalError(f"nonfinite or nonpositive factor at sweep {report.iterations + 1}")
        change = max(_rel_change(u, u_new), _rel_change(v, v_new))
        u, v = u_new, v_new
        report.iterations += 1
        report.final_change = change
        if record_history:
            record(change)
        if change <= tol:
            report.converged = True
            break
    return FactorPair(u, v), report


def n_components(X: ObservedMatrix) -> int:
    """Number of connected components of the observation graph (rows then columns)."""
    size = X.m + X.n
    A = sp.coo_matrix((np.ones(len(X.rows)), (X.rows, X.m + X.cols)), shape=(size, size))
    return int(connected_components(A, directed=False)[0])


def _rel_change(old, new) -> float:
    if old.size == 0:
        return 0.0
    return float(np.max(np.abs(new - old) / np.abs(old)))
