from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError

MISSING = -1


@dataclass(frozen=True)
class LabelSet:
    """(worker, task, label) triples with at most one label per worker-task pair."""

    W: int
    T: int
    M: int
    workers: np.ndarray
    tasks: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if self.M < 2:
            raise InputError(f"need at least 2 classes, got M={self.M}")
        w, t, y = self.workers, self.tasks, self.labels
        if not (w.shape == t.shape == y.shape):
            raise InputError("worker, task and label arrays differ in length")
        if w.size:
            if w.min() < 0 or w.max() >= self.W or t.min() < 0 or t.max() >= self.T:
                raise InputError("worker or task id out of range")
            if y.min() < 0 or y.max() >= self.M:
                raise InputError(f"labels must lie in [0, {self.M})")
            key = w.astype(np.int64) * self.T + t
            if np.unique(key).size != key.size:
                raise InputError("more than one label for a (worker, task) pair")

    @classmethod
    def from_triples(cls, W, T, M, triples):
        arr = np.asarray(list(triples), dtype=np.int64).reshape(-1, 3)
        return cls(W, T, M, arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy())

    @classmethod
    def from_matrix(cls, Y: np.ndarray, M: int) -> "LabelSet":
        """From a W x T integer matrix holding ``MISSING`` where no label exists."""
        w, t = np.nonzero(Y != MISSING)
        return cls(Y.shape[0], Y.shape[1], M, w, t, Y[w, t].astype(np.int64))

    def matrix(self) -> np.ndarray:
        Y = np.full((self.W, self.T), MISSING, dtype=np.int64)
        Y[self.workers, self.tasks] = self.labels
        return Y

    def tasks_per_worker(self) -> np.ndarray:
        return np.bincount(self.workers, minlength=self.W)

    def __len__(self):
        return int(self.labels.size)
