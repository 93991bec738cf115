"""Corruption patterns for rank-one completion experiments.

Two adversaries are provided.  The pinning adversary is adaptive: corrupted
vertices are frozen and their entries are chosen so that every normal
neighbor always sees a fixed ratio.  The static adversary just overwrites the
entries of corrupted rows/columns.  ``necessity_instance`` builds the
configuration that blocks consensus on graphs lacking (2F+1)-robustness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graph import BipartiteGraph, CorruptionSet, build_graph, is_F_local, robustness_witness
from .solver import GroundTruth, ObservedMatrix, initial_row_values, run_mmsr


@dataclass
class Instance:
    X: ObservedMatrix
    truth: GroundTruth
    corrupted: CorruptionSet
    v0: np.ndarray
    u0: np.ndarray | None = None
    frozen: CorruptionSet | None = None


def random_f_local_set(graph: BipartiteGraph, F: int, size: int, rng) -> CorruptionSet:
    """Greedily grow a random corruption set of up to ``size`` vertices, kept F-local."""
    order = rng.permutation(graph.num_vertices)
    left, right = set(), set()
    for idx in order:
        if len(left) + len(right) >= size:
            break
        side, k = graph.vertex(int(idx))
        trial_l = left | {k} if side == "L" else left
        trial_r = right | {k} if side == "R" else right
        if is_F_local(graph, CorruptionSet.of(trial_l, trial_r), F):
            left, right = trial_l, trial_r
    return CorruptionSet.of(left, right)


def _edge_arrays(graph: BipartiteGraph):
    e = np.array(graph.edges, dtype=np.int64).reshape(-1, 2)
    return e[:, 0], e[:, 1]


def pinned_instance(graph, a, b, corrupted: CorruptionSet, scales, rng) -> Instance:
    """Frozen corrupted vertices that make each normal neighbor see ``scale x`` its true value.

    ``scales`` is a sequence of multipliers; each corrupted edge draws one.
    A normal column j adjacent to corrupted row i reads ``X_ij / u_i = s * b_j``;
    a normal row i adjacent to corrupted column j reads ``X_ij / v_j = s * a_i``.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    rows, cols = _edge_arrays(graph)
    bad_l = np.zeros(graph.m, bool)
    bad_r = np.zeros(graph.n, bool)
    bad_l[list(corrupted.left)] = True
    bad_r[list(corrupted.right)] = True
    vals = a[rows] * b[cols]
    s = rng.choice(np.asarray(scales, float), size=rows.size)
    # frozen values: u_i = a_i on corrupted rows, v_j = b_j on corrupted columns
    only_row = bad_l[rows] & ~bad_r[cols]
    only_col = bad_r[cols] & ~bad_l[rows]
    vals[only_row] = a[rows[only_row]] * s[only_row] * b[cols[only_row]]
    vals[only_col] = b[cols[only_col]] * s[only_col] * a[rows[only_col]]
    X = ObservedMatrix(graph.m, graph.n, rows, cols, vals)
    v0 = np.ones(graph.n)
    v0[bad_r] = b[bad_r]
    u0 = initial_row_values(X, v0)
    u0[bad_l] = a[bad_l]
    truth = GroundTruth.with_corruption(a, b, corrupted)
    return Instance(X, truth, corrupted, v0, u0, frozen=corrupted)


def static_instance(graph, a, b, corrupted: CorruptionSet, scales, rng) -> Instance:
    """Corrupted rows/columns have every entry multiplied by a random choice of ``scales``."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    rows, cols = _edge_arrays(graph)
    bad = np.isin(rows, list(corrupted.left)) | np.isin(cols, list(corrupted.right))
    vals = a[rows] * b[cols]
    vals[bad] *= rng.choice(np.asarray(scales, float), size=int(bad.sum()))
    X = ObservedMatrix(graph.m, graph.n, rows, cols, vals)
    truth = GroundTruth.with_corruption(a, b, corrupted)
    return Instance(X, truth, corrupted, np.ones(graph.n))


def induced_subgraph(graph: BipartiteGraph, drop: CorruptionSet):
    """Graph on the surviving vertices plus maps from new to old indices."""
    keep_l = [i for i in range(graph.m) if i not in drop.left]
    keep_r = [j for j in range(graph.n) if j not in drop.right]
    new_l = {i: k for k, i in enumerate(keep_l)}
    new_r = {j: k for k, j in enumerate(keep_r)}
    edges = [(new_l[i], new_r[j]) for i, j in graph.edges if i in new_l and j in new_r]
    return build_graph(len(keep_l), len(keep_r), edges), keep_l, keep_r


@dataclass
class NecessityInstance(Instance):
    high_set: set | None = None
    low_set: set | None = None
    high: float = 2.0
    low: float = 1.0


def find_blocking_pair(graph: BipartiteGraph, F: int, max_corrupted: int = 2):
    """Search for an F-local set C and disjoint normal sets S1, S2 that stall M-MSR.

    Every vertex of S1 (S2) must have at most F normal neighbors outside its
    own set; its remaining outside neighbors are corrupted and can echo its
    value.  Equivalently S1, S2 witness that ``graph - C`` is not
    (F+1)-robust.  Smaller C are tried first, nonempty before empty.
    """
    verts = graph.vertices()
    sizes = list(range(1, max_corrupted + 1)) + [0]
    for size in sizes:
        for combo in itertools.combinations(verts, size):
            C = CorruptionSet.of(
                (k for s, k in combo if s == "L"), (k for s, k in combo if s == "R")
            )
            if not is_F_local(graph, C, F):
                continue
            sub, keep_l, keep_r = induced_subgraph(graph, C)
            if sub.num_vertices < 2:
                continue
            w = robustness_witness(sub, F + 1)
            if w is None:
                continue

            def back(vs):
                return {("L", keep_l[k]) if s == "L" else ("R", keep_r[k]) for s, k in vs}

            return C, back(w[0]), back(w[1])
    return None


def necessity_instance(graph, F, a, b, rng, high=2.0, low=1.0, max_corrupted=2):
    """The consensus-blocking configuration, or None if none is found.

    Normal vertices in S1 start at value ``high``, those in S2 at ``low``,
    the rest strictly between.  Frozen corrupted neighbors always report the
    receiving vertex's own starting value, so S1 and S2 only ever average
    values equal to their own and never move.
    """
    found = find_blocking_pair(graph, F, max_corrupted)
    if found is None:
        return None
    C, S1, S2 = found
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    k_left = rng.uniform(low, high, graph.m)
    k_right = rng.uniform(low, high, graph.n)
    for s, k in S1:
        (k_left if s == "L" else k_right)[k] = high
    for s, k in S2:
        (k_left if s == "L" else k_right)[k] = low
    u0 = a * k_left
    v0 = b / k_right
    u0[list(C.left)] = a[list(C.left)]
    v0[list(C.right)] = b[list(C.right)]

    rows, cols = _edge_arrays(graph)
    bad_l = np.isin(rows, list(C.left))
    bad_r = np.isin(cols, list(C.right))
    vals = a[rows] * b[cols]
    to_col = bad_l & ~bad_r
    to_row = bad_r & ~bad_l
    vals[to_col] = u0[rows[to_col]] * b[cols[to_col]] / k_right[cols[to_col]]
    vals[to_row] = v0[cols[to_row]] * a[rows[to_row]] * k_left[rows[to_row]]
    X = ObservedMatrix(graph.m, graph.n, rows, cols, vals)
    truth = GroundTruth.with_corruption(a, b, C)
    return NecessityInstance(X, truth, C, v0, u0, C, S1, S2, high, low)


def solve_instance(inst: Instance, F: int, **kwargs):
    """Run M-MSR on an attack instance with its starting point, frozen set and truth."""
    return run_mmsr(inst.X, F, inst.v0, u0=inst.u0, frozen=inst.frozen, truth=inst.truth, **kwargs)
