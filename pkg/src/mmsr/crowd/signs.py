"""Recover the sign pattern of a rank-one matrix from the signs of its entries.

Choosing signs that disagree with as few observed entries as possible is a
two-coloring problem: a negative entry asks its endpoints to differ, which is
what an edge of a properly two-colored graph does, and a positive entry asks
them to agree, which an edge split by an extra middle vertex does.  On the
resulting graph the eigenvector of the smallest eigenvalue of the random-walk
matrix ``D^-1 A`` alternates sign across as many edges as possible.  When the
pattern is perfectly consistent the graph is bipartite, that eigenvalue is
exactly -1 and the eigenvector is +-1 on the two sides.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from ..errors import NumericalError

log = logging.getLogger(__name__)

ZERO_COMPONENT = 1e-9
DENSE_LIMIT = 600
EIG_TOL = 1e-10
EIG_MAXITER = 10_000


@dataclass
class SignAssignment:
    signs: np.ndarray
    smallest_eigenvalues: list[float] = field(default_factory=list)
    flagged: np.ndarray | None = None
    eigenvectors: list[np.ndarray] = field(default_factory=list)
    flipped: bool = False


def mismatches(signs, i, j, pattern) -> int:
    """Number of observed pairs whose sign disagrees with ``signs[i] * signs[j]``."""
    signs = np.asarray(signs)
    return int(np.count_nonzero(signs[i] * signs[j] != pattern))


def augmented_graph(W: int, i, j, pattern):
    """Adjacency of the two-coloring graph: negative pairs direct, positive pairs split."""
    i, j, pattern = map(np.asarray, (i, j, pattern))
    neg = pattern < 0
    pos = np.flatnonzero(~neg)
    mid = W + np.arange(pos.size)
    src = np.concatenate((i[neg], i[pos], mid))
    dst = np.concatenate((j[neg], mid, j[pos]))
    size = W + pos.size
    A = sp.coo_matrix((np.ones(src.size), (src, dst)), shape=(size, size)).tocsr()
    return (A + A.T).tocsr()


def _smallest_eigpair(A: sp.csr_matrix):
    """Smallest eigenpair of ``D^-1 A`` through the similar ``D^-1/2 A D^-1/2``."""
    deg = np.asarray(A.sum(axis=1)).ravel()
    scale = 1.0 / np.sqrt(deg)
    S = sp.diags(scale) @ A @ sp.diags(scale)
    if S.shape[0] <= DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(S.toarray())
        lam, y = vals[0], vecs[:, 0]
    else:
        try:
            vals, vecs = eigsh(S, k=1, which="SA", tol=EIG_TOL, maxiter=EIG_MAXITER)
        except ArpackNoConvergence as exc:
            raise NumericalError(f"eigen-solver did not converge: {exc}") from exc
        lam, y = vals[0], vecs[:, 0]
    resid = np.linalg.norm(S @ y - lam * y)
    if resid > 1e-6:
        raise NumericalError(f"smallest eigenvector residual {resid:.3g} too large")
    return float(lam), scale * y


def _local_refine(signs, nbrs):
    """Flip single vertices while that strictly lowers the mismatch count."""
    improved = True
    while improved:
        improved = False
        for v, (others, pat) in enumerate(nbrs):
            if others.size == 0:
                continue
            agree = np.count_nonzero(signs[v] * signs[others] == pat)
            if agree * 2 < others.size:
                signs[v] = -signs[v]
                improved = True
    return signs


def sign_determination(W: int, i, j, pattern, refine: bool = True) -> SignAssignment:
    """Assign +-1 to each of ``W`` nodes from the signs of observed pairs.

    Parameters
    ----------
    i, j : int arrays
        Endpoints of each observed pair (each unordered pair once).
    pattern : array of +-1
        Observed sign of each pair.
    refine : bool
        Follow the spectral assignment by single-vertex flips that strictly
        reduce the mismatch count.

    Each connected component is solved separately and then oriented so that
    it has more + than - nodes; on a tie its lowest-index node gets +.
    Isolated nodes get + and are flagged.
    """
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    pattern = np.sign(np.asarray(pattern, dtype=float)).astype(np.int64)
    signs = np.ones(W, dtype=np.int64)
    flagged = np.zeros(W, dtype=bool)
    out = SignAssignment(signs, flagged=flagged)
    if W == 0:
        return out

    A = augmented_graph(W, i, j, pattern)
    n_comp, comp = connected_components(A, directed=False)
    for c in range(n_comp):
        members = np.flatnonzero(comp == c)
        workers = members[members < W]
        if members.size == 1:
            flagged[workers] = True
            continue
        sub = A[members][:, members]
        lam, x = _smallest_eigpair(sub)
        out.smallest_eigenvalues.append(lam)
        out.eigenvectors.append(x)
        xw = x[: workers.size]  # members are sorted, so workers come first
        zero = np.abs(xw) < ZERO_COMPONENT
        flagged[workers[zero]] = True
        signs[workers] = np.where(xw < 0, -1, 1)

    if refine:
        nbrs = []
        for v in range(W):
            sel_i = i == v
            sel_j = j == v
            nbrs.append(
                (np.concatenate((j[sel_i], i[sel_j])), np.concatenate((pattern[sel_i], pattern[sel_j])))
            )
        _local_refine(signs, nbrs)

    for c in range(n_comp):
        workers = np.flatnonzero(comp[:W] == c)
        if workers.size == 0:
            continue
        balance = int(signs[workers].sum())
        if balance < 0 or (balance == 0 and signs[workers[0]] < 0):
            signs[workers] = -signs[workers]
            out.flipped = True
    if flagged.any():
        log.info("sign determination flagged %d nodes", int(flagged.sum()))
    return out
