"""Bipartite observation graphs, corruption locality and robustness checks.

Vertices live on two sides: row vertices ``("L", i)`` for ``0 <= i < m`` and
column vertices ``("R", j)`` for ``0 <= j < n``.  Exhaustive checks work on a
flat index where ``("L", i) -> i`` and ``("R", j) -> m + j``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import CapabilityError, InputError

BRUTE_FORCE_LIMIT = 16

Vertex = tuple[str, int]


@dataclass(frozen=True)
class BipartiteGraph:
    m: int
    n: int
    edges: tuple[tuple[int, int], ...]
    row_nbrs: tuple[tuple[int, ...], ...] = field(repr=False, compare=False, default=())
    col_nbrs: tuple[tuple[int, ...], ...] = field(repr=False, compare=False, default=())

    def __post_init__(self):
        rows: list[list[int]] = [[] for _ in range(self.m)]
        cols: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            rows[i].append(j)
            cols[j].append(i)
        object.__setattr__(self, "row_nbrs", tuple(tuple(sorted(r)) for r in rows))
        object.__setattr__(self, "col_nbrs", tuple(tuple(sorted(c)) for c in cols))

    @property
    def num_vertices(self) -> int:
        return self.m + self.n

    def neighbors(self, v: Vertex) -> tuple[Vertex, ...]:
        side, k = _check_vertex(self, v)
        if side == "L":
            return tuple(("R", j) for j in self.row_nbrs[k])
        return tuple(("L", i) for i in self.col_nbrs[k])

    def degree(self, v: Vertex) -> int:
        return len(self.neighbors(v))

    def vertices(self) -> list[Vertex]:
        return [("L", i) for i in range(self.m)] + [("R", j) for j in range(self.n)]

    def index(self, v: Vertex) -> int:
        side, k = _check_vertex(self, v)
        return k if side == "L" else self.m + k

    def vertex(self, idx: int) -> Vertex:
        return ("L", idx) if idx < self.m else ("R", idx - self.m)

    def adjacency_masks(self) -> list[int]:
        """Neighbor set of every flat-indexed vertex as an integer bitmask."""
        masks = [0] * self.num_vertices
        for i, j in self.edges:
            masks[i] |= 1 << (self.m + j)
            masks[self.m + j] |= 1 << i
        return masks

    def is_connected(self) -> bool:
        if self.num_vertices == 0:
            return True
        full = (1 << self.num_vertices) - 1
        return _component_mask(self.adjacency_masks(), full, 1) == full

    def components(self) -> list[set[Vertex]]:
        adj = self.adjacency_masks()
        remaining = (1 << self.num_vertices) - 1
        comps = []
        while remaining:
            start = remaining & -remaining
            comp = _component_mask(adj, remaining, start)
            comps.append({self.vertex(k) for k in _bits(comp)})
            remaining &= ~comp
        return comps


@dataclass(frozen=True)
class CorruptionSet:
    left: frozenset[int] = frozenset()
    right: frozenset[int] = frozenset()

    @classmethod
    def of(cls, left: Iterable[int] = (), right: Iterable[int] = ()) -> "CorruptionSet":
        return cls(frozenset(left), frozenset(right))

    def __contains__(self, v: Vertex) -> bool:
        side, k = v
        return k in (self.left if side == "L" else self.right)

    def vertices(self) -> set[Vertex]:
        return {("L", i) for i in self.left} | {("R", j) for j in self.right}


def _check_vertex(g: BipartiteGraph, v: Vertex) -> Vertex:
    side, k = v
    if side == "L" and 0 <= k < g.m or side == "R" and 0 <= k < g.n:
        return side, k
    raise InputError(f"vertex {v!r} is not in the graph (m={g.m}, n={g.n})")


def _bits(mask: int):
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def _component_mask(adj: list[int], allowed: int, start: int) -> int:
    seen = start
    frontier = start
    while frontier:
        nxt = 0
        for k in _bits(frontier):
            nxt |= adj[k]
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def build_graph(m: int, n: int, omega: Iterable[tuple[int, int]]) -> BipartiteGraph:
    """Build the observation graph of an index set, dropping duplicate pairs."""
    if m < 0 or n < 0:
        raise InputError(f"dimensions must be nonnegative, got m={m}, n={n}")
    edges = set()
    for pair in omega:
        i, j = int(pair[0]), int(pair[1])
        if not (0 <= i < m and 0 <= j < n):
            raise InputError(f"index pair {(i, j)} out of range for a {m}x{n} matrix")
        edges.add((i, j))
    return BipartiteGraph(m, n, tuple(sorted(edges)))


def _check_corruption(g: BipartiteGraph, c: CorruptionSet) -> None:
    bad = [i for i in c.left if not 0 <= i < g.m] + [j for j in c.right if not 0 <= j < g.n]
    if bad:
        raise InputError(f"corrupted vertices out of range: {sorted(bad)}")


def local_corruption_bound(graph: BipartiteGraph, corrupted: CorruptionSet) -> int:
    """Smallest F for which ``corrupted`` is F-local in ``graph``.

    Every vertex's neighborhood is counted, corrupted ones included, so that
    ``is_F_local(graph, corrupted, F)`` holds exactly when ``F >= bound``.
    """
    _check_corruption(graph, corrupted)
    worst = 0
    for nbrs in graph.row_nbrs:
        worst = max(worst, sum(1 for j in nbrs if j in corrupted.right))
    for nbrs in graph.col_nbrs:
        worst = max(worst, sum(1 for i in nbrs if i in corrupted.left))
    return worst


def is_F_local(graph: BipartiteGraph, corrupted: CorruptionSet, F: int) -> bool:
    return local_corruption_bound(graph, corrupted) <= F


def is_r_reachable(graph: BipartiteGraph, subset: Iterable[Vertex], r: int) -> bool:
    members = {_check_vertex(graph, v) for v in subset}
    if not members:
        raise InputError("reachability is undefined for an empty vertex set")
    return any(
        sum(1 for w in graph.neighbors(v) if w not in members) >= r for v in members
    )


def _check_limit(graph: BipartiteGraph, limit: int) -> None:
    if graph.num_vertices > limit:
        raise CapabilityError(
            f"exhaustive check needs m + n <= {limit}, got {graph.num_vertices}; "
            "no sampling-based robustness estimate is provided"
        )


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x)


def robustness_witness(
    graph: BipartiteGraph, r: int, limit: int = BRUTE_FORCE_LIMIT
) -> tuple[set[Vertex], set[Vertex]] | None:
    """A pair of disjoint nonempty sets, neither r-reachable, or None.

    Every vertex subset is classified as r-reachable or not in one vectorized
    pass; a subset-OR transform then answers "does the complement of S contain
    a non-reachable set" for all S at once.  This is exact and visits the same
    (S1, S2) pairs as ternary labeling, in O(N 2^N) instead of O(3^N).
    """
    _check_limit(graph, limit)
    N = graph.num_vertices
    if N == 0:
        raise InputError("graph has no vertices")
    if r <= 0:
        return None
    masks = np.arange(1 << N, dtype=np.uint32)
    adj = graph.adjacency_masks()
    reachable = np.zeros(masks.shape, dtype=bool)
    for v in range(N):
        deg = bin(adj[v]).count("1")
        inside = _popcount(masks & np.uint32(adj[v])).astype(np.int64)
        reachable |= ((masks >> np.uint32(v)) & 1).astype(bool) & (deg - inside >= r)
    stuck = ~reachable
    stuck[0] = False

    # witness[S] = some non-reachable subset of S (0 if none)
    witness = np.where(stuck, masks, 0).astype(np.uint32)
    for b in range(N):
        bit = np.uint32(1 << b)
        with_bit = (masks & bit) != 0
        src = witness[masks[with_bit] ^ bit]
        cur = witness[with_bit]
        witness[with_bit] = np.where(cur == 0, src, cur)

    full = np.uint32((1 << N) - 1)
    s1_candidates = np.flatnonzero(stuck)
    partners = witness[full ^ masks[s1_candidates]]
    hit = np.flatnonzero(partners != 0)
    if hit.size == 0:
        return None
    s1 = int(s1_candidates[hit[0]])
    s2 = int(partners[hit[0]])
    return (
        {graph.vertex(k) for k in _bits(s1)},
        {graph.vertex(k) for k in _bits(s2)},
    )


def is_r_robust(graph: BipartiteGraph, r: int, limit: int = BRUTE_FORCE_LIMIT) -> bool:
    return robustness_witness(graph, r, limit) is None


def vertex_connectivity(graph: BipartiteGraph, limit: int = BRUTE_FORCE_LIMIT) -> int:
    """Minimum number of vertex removals that disconnects the rest.

    Disconnected graphs give 0.  When no separator exists, as for a single
    edge, the result is ``m + n - 1``.
    """
    _check_limit(graph, limit)
    N = graph.num_vertices
    adj = graph.adjacency_masks()
    full = (1 << N) - 1
    if N == 0 or _component_mask(adj, full, 1) != full:
        return 0
    for k in range(1, N - 1):
        for removed in itertools.combinations(range(N), k):
            rest = full
            for v in removed:
                rest &= ~(1 << v)
            start = rest & -rest
            if _component_mask(adj, rest, start) != rest:
                return k
    return max(N - 1, 0)


def generate_er_bipartite(n_left: int, n_right: int, p: float, seed) -> BipartiteGraph:
    """Random bipartite graph with each edge present independently w.p. ``p``."""
    if not 0.0 <= p <= 1.0:
        raise InputError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    present = rng.random((n_left, n_right)) < p
    rows, cols = np.nonzero(present)
    return BipartiteGraph(n_left, n_right, tuple(zip(rows.tolist(), cols.tolist())))


def theorem1_threshold(n: int, F: int, x: float) -> float:
    """Edge probability ``(ln n + 2F ln ln n + x) / n`` clipped to [0, 1]."""
    if n < 3:
        raise InputError(f"threshold needs n >= 3 so that ln ln n > 0, got {n}")
    p = (math.log(n) + 2 * F * math.log(math.log(n)) + x) / n
    return min(1.0, max(0.0, p))
