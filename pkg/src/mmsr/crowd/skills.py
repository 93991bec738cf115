"""Worker skill estimation: robust rank-one completion of the centered agreement matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..solver import DEFAULT_MAX_ITER, DEFAULT_TOL, ObservedMatrix, run_mmsr
from .agreement import EPS_FLOOR, agreement_matrix, c_hat
from .labels import LabelSet
from .signs import sign_determination
from .simulate import skill_to_accuracy

log = logging.getLogger(__name__)


@dataclass
class SkillEstimate:
    s: np.ndarray
    p: np.ndarray
    weights: np.ndarray
    sign_flip_applied: bool = False
    raw_s: np.ndarray | None = None
    flagged: np.ndarray | None = None
    info: dict = field(default_factory=dict)


def projection_bounds(M: int, n_tasks) -> tuple[np.ndarray, np.ndarray]:
    """Per-worker interval ``[-1/(M-1) + 1/sqrt(N_i), 1 - 1/sqrt(N_i)]``."""
    root = np.sqrt(np.maximum(np.asarray(n_tasks, float), 1.0))
    return -1.0 / (M - 1) + 1.0 / root, 1.0 - 1.0 / root


def project_skills(s, M: int, n_tasks) -> tuple[np.ndarray, np.ndarray]:
    """Clamp skills into their per-worker interval.

    Workers whose interval is empty (too few tasks) get skill 0.  Returns the
    projected skills and a mask of those degenerate workers.
    """
    lo, hi = projection_bounds(M, n_tasks)
    empty = lo > hi
    out = np.clip(np.asarray(s, float), lo, np.maximum(lo, hi))
    out[empty] = 0.0
    return out, empty


def skills_to_weights(s, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Accuracies and log-odds vote weights ``ln((M-1) p / (1 - p))``."""
    p = skill_to_accuracy(s, M)
    with np.errstate(divide="ignore"):
        w = np.log((M - 1) * p) - np.log1p(-p)
    return p, w


def skill_estimate_from(s_raw, M, n_tasks, flagged=None, sign_flip=False, info=None):
    s, empty = project_skills(s_raw, M, n_tasks)
    p, w = skills_to_weights(s, M)
    flagged = empty if flagged is None else (flagged | empty)
    return SkillEstimate(s, p, w, sign_flip, np.asarray(s_raw, float), flagged, info or {})


def skills_from_c_hat(C: ObservedMatrix, F: int = 1, *, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL):
    """Raw signed skills from a symmetric signed ``C_hat`` (no projection).

    The magnitude of worker i's skill is ``sqrt(u_i v_i)`` where ``(u, v)``
    is the M-MSR factorization of ``|C_hat|`` (the matrix is symmetric, so
    this removes the factor scale ambiguity).  Signs come from the
    two-coloring of the sign pattern of ``C_hat``.  Workers with no usable
    pair get skill 0 and are flagged.

    Returns ``(s_raw, flagged, sign_flip_applied, info)``.
    """
    W = C.m
    absC = C.with_values(np.abs(C.vals))
    fp, report = run_mmsr(absC, F, max_iter=max_iter, tol=tol)
    isolated = np.bincount(C.rows, minlength=W) == 0
    magnitude = np.sqrt(fp.u * fp.v)
    magnitude[isolated] = 0.0

    upper = C.rows < C.cols
    signs = sign_determination(W, C.rows[upper], C.cols[upper], np.sign(C.vals[upper]))
    if isolated.any():
        log.warning("%d workers share no usable tasks; their skill is set to 0", int(isolated.sum()))
    info = {
        "mmsr_iterations": report.iterations,
        "mmsr_converged": report.converged,
        "mmsr_warnings": list(report.warnings),
        "observed_pairs": int(upper.sum()),
    }
    return signs.signs * magnitude, isolated | signs.flagged, signs.flipped, info


def estimate_skills(
    labels: LabelSet,
    F: int = 1,
    *,
    N_min: int = 1,
    eps_floor: float = EPS_FLOOR,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    project: bool = True,
) -> SkillEstimate:
    """Skills from agreement data via M-MSR on ``|C_hat|`` plus sign recovery."""
    M = labels.M
    C = c_hat(agreement_matrix(labels, N_min), M, eps_floor)
    s_raw, flagged, flipped, info = skills_from_c_hat(C, F, max_iter=max_iter, tol=tol)
    if not project:
        p, w = skills_to_weights(s_raw, M)
        return SkillEstimate(s_raw, p, w, flipped, s_raw, flagged, info)
    return skill_estimate_from(s_raw, M, labels.tasks_per_worker(), flagged, flipped, info)
