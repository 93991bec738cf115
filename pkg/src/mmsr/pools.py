"""Seeded instance pools shared by the test suite and the experiment scripts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adversary import necessity_instance, pinned_instance, random_f_local_set, static_instance
from .graph import BipartiteGraph, build_graph, generate_er_bipartite, is_r_robust
from .solver import GroundTruth, ObservedMatrix


def complete_bipartite(m: int, n: int) -> BipartiteGraph:
    return build_graph(m, n, ((i, j) for i in range(m) for j in range(n)))


@dataclass
class ConsensusCase:
    X: ObservedMatrix
    truth: GroundTruth


def consensus_cases(count=200, seed=0, sizes=(5, 30), scale=(0.5, 2.0)):
    """Uncorrupted instances on connected ER graphs with ``p = 3 ln n / n``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(sizes[0], sizes[1] + 1))
        p = min(1.0, 3 * math.log(n) / n)
        g = generate_er_bipartite(n, n, p, rng)
        if not g.is_connected():
            continue
        a = rng.uniform(*scale, n)
        b = rng.uniform(*scale, n)
        rows, cols = (np.array(x, dtype=np.int64) for x in zip(*g.edges))
        X = ObservedMatrix(n, n, rows, cols, a[rows] * b[cols])
        out.append(ConsensusCase(X, GroundTruth(a, b)))
    return out


def robust_pool(F: int, max_vertices=14, count=40, seed=0, max_draws=400):
    """Graphs with at most ``max_vertices`` vertices certified (2F+1)-robust.

    Every qualifying complete bipartite graph is included, then up to
    ``count`` distinct random dense graphs that pass the exhaustive check.
    For F >= 2 the random draws rarely qualify at this size.
    """
    r = 2 * F + 1
    pool = []
    for m in range(1, max_vertices):
        for n in range(1, max_vertices - m + 1):
            g = complete_bipartite(m, n)
            if is_r_robust(g, r):
                pool.append(g)
    seen = {(g.m, g.n, g.edges) for g in pool}
    rng = np.random.default_rng(seed)
    added = 0
    for _ in range(max_draws):
        if added >= count:
            break
        m = int(rng.integers(r, max_vertices - r + 1))
        n = int(rng.integers(r, max_vertices - m + 1))
        g = generate_er_bipartite(m, n, rng.uniform(0.6, 1.0), rng)
        key = (g.m, g.n, g.edges)
        if key in seen or not g.is_connected() or not is_r_robust(g, r):
            continue
        seen.add(key)
        pool.append(g)
        added += 1
    return pool


def sufficiency_cases(F: int, pool, seed=0, scales=(1e3, 1e-3), attacks=1):
    """Pinned and static F-local attacks, ``attacks`` random corruption sets per graph."""
    rng = np.random.default_rng(seed)
    for g in pool:
        for _ in range(attacks):
            a = rng.uniform(0.5, 2.0, g.m)
            b = rng.uniform(0.5, 2.0, g.n)
            C = random_f_local_set(g, F, int(rng.integers(1, g.num_vertices // 2 + 1)), rng)
            for make in (pinned_instance, static_instance):
                yield g, make(g, a, b, C, list(scales), rng)


def necessity_cases(count=20, seed=0, max_vertices=14, Fs=(1, 2)):
    """Connected graphs failing (2F+1)-robustness, each with its blocking instance."""
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    while len(out) < count and tries < 100 * count:
        tries += 1
        F = int(Fs[len(out) % len(Fs)])
        m = int(rng.integers(3, 8))
        n = int(rng.integers(3, 8))
        if m + n > max_vertices:
            continue
        g = generate_er_bipartite(m, n, rng.uniform(0.4, 0.9), rng)
        if not g.is_connected() or is_r_robust(g, 2 * F + 1):
            continue
        a = rng.uniform(0.5, 2.0, m)
        b = rng.uniform(0.5, 2.0, n)
        inst = necessity_instance(g, F, a, b, rng)
        if inst is not None:
            out.append((g, F, inst))
    return out


def planted_sign_graphs(count=500, seed=0, max_workers=10, noise=(0.0, 0.2), density=(0.3, 1.0)):
    """Sign patterns ``s_i s_j`` of a hidden +-1 vector with each pair flipped w.p. ``q``.

    ``q`` is drawn per graph from ``noise``.  Yields ``(W, i, j, pattern)``.
    """
    rng = np.random.default_rng(seed)
    made = 0
    while made < count:
        W = int(rng.integers(2, max_workers + 1))
        ii, jj = np.triu_indices(W, 1)
        keep = rng.random(ii.size) < rng.uniform(*density)
        ii, jj = ii[keep], jj[keep]
        if ii.size == 0:
            continue
        s = rng.choice([-1, 1], size=W)
        pattern = s[ii] * s[jj]
        pattern[rng.random(ii.size) < rng.uniform(*noise)] *= -1
        made += 1
        yield W, ii, jj, pattern


def exhaustive_sign_optimum(W, i, j, pattern) -> int:
    """Fewest mismatches over all 2^W sign vectors."""
    S = np.array(np.meshgrid(*[[1, -1]] * W, indexing="ij")).reshape(W, -1).T
    return int(((S[:, i] * S[:, j]) != pattern).sum(axis=1).min())
