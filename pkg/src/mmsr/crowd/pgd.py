"""Projected gradient descent baseline for skill estimation."""

from __future__ import annotations

import numpy as np

from ..errors import InputError, NumericalError
from .agreement import AgreementMatrix, c_hat_values

DIVERGENCE = 1e12


def pgd_objective(x, i, j, target, weight) -> float:
    r = target - x[i] * x[j]
    return 0.5 * float(np.sum(weight * r * r))


def default_step(agree: AgreementMatrix) -> float:
    load = agree.N.sum(axis=1).max() if agree.W else 0
    return 1.0 / (2.0 * max(load, 1))


def pgd_skills(
    agree: AgreementMatrix,
    M: int,
    step: float | None = None,
    iters: int = 500,
    x0=None,
    *,
    history: list | None = None,
) -> np.ndarray:
    """Minimize ``1/2 sum N_ij (C_hat_ij - x_i x_j)^2`` over ``[-1, 1]^W``.

    The sum runs over each observed unordered pair once.
    """
    step = default_step(agree) if step is None else step
    if step <= 0:
        raise InputError(f"step must be positive, got {step}")
    i, j = agree.pairs()
    target = c_hat_values(agree, M)[i, j]
    weight = agree.N[i, j].astype(float)
    x = np.full(agree.W, 0.5) if x0 is None else np.array(x0, dtype=float)
    for _ in range(iters):
        r = weight * (target - x[i] * x[j])
        grad = -(np.bincount(i, r * x[j], agree.W) + np.bincount(j, r * x[i], agree.W))
        x = np.clip(x - step * grad, -1.0, 1.0)
        obj = pgd_objective(x, i, j, target, weight)
        if history is not None:
            history.append(obj)
        if not np.isfinite(obj) or obj > DIVERGENCE:
            raise NumericalError(f"projected gradient descent diverged (objective {obj:.3g})")
    return x
