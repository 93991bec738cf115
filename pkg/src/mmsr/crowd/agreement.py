"""Pairwise worker agreement and its centered, rank-one-in-expectation form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..solver import ObservedMatrix
from .labels import LabelSet

EPS_FLOOR = 1e-9


@dataclass(frozen=True)
class AgreementMatrix:
    """Dense W x W agreement rates; ``nan`` where a pair is not observed.

    ``C_tilde[i, j]`` is the fraction of the ``N[i, j]`` shared tasks on which
    workers i and j gave the same label.  The diagonal is always ``nan``.
    """

    C_tilde: np.ndarray
    N: np.ndarray

    @property
    def W(self) -> int:
        return self.C_tilde.shape[0]

    def pairs(self):
        """Observed unordered pairs ``(i, j)`` with ``i < j``."""
        i, j = np.nonzero(np.triu(~np.isnan(self.C_tilde), k=1))
        return i, j


def agreement_matrix(labels: LabelSet, N_min: int = 1) -> AgreementMatrix:
    Y = labels.matrix()
    observed = (Y >= 0).astype(float)
    shared = observed @ observed.T
    agree = np.zeros_like(shared)
    for c in range(labels.M):
        onehot = (Y == c).astype(float)
        agree += onehot @ onehot.T
    N = np.rint(shared).astype(np.int64)
    keep = N >= max(N_min, 1)
    np.fill_diagonal(keep, False)
    C = np.full(shared.shape, np.nan)
    C[keep] = agree[keep] / shared[keep]
    N = np.where(keep, N, 0)
    return AgreementMatrix(C, N)


def c_hat_values(agree: AgreementMatrix, M: int) -> np.ndarray:
    """Dense ``M/(M-1) * C_tilde - 1/(M-1)`` with ``nan`` at unobserved pairs."""
    if M < 2:
        raise InputError(f"need at least 2 classes, got M={M}")
    return M / (M - 1) * agree.C_tilde - 1.0 / (M - 1)


def c_hat(agree: AgreementMatrix, M: int, eps_floor: float = EPS_FLOOR) -> ObservedMatrix:
    """Signed, symmetric W x W observed matrix; near-zero entries are dropped."""
    C = c_hat_values(agree, M)
    mask = ~np.isnan(C) & (np.abs(np.nan_to_num(C)) >= eps_floor)
    return ObservedMatrix.from_dense(np.nan_to_num(C), mask)
