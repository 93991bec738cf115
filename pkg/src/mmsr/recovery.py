"""Exact-recovery experiments: planted rank-one matrices hit by sparse large noise.

Besides M-MSR, two factorization baselines are provided: squared-loss gradient
descent (``pca_baseline``) and l1-loss subgradient descent with a balancing
regularizer (``rpca_baseline``).
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InputError, NumericalError
from .solver import FactorPair, GroundTruth, ObservedMatrix, init_row_completion, reconstruct_error, run_mmsr

METHODS = ("mmsr", "pca", "rpca")
DIVERGENCE = 1e12
PCA_STEP_SCALE = 0.1
STALL = 1e-30  # objective this small (relative) is zero to working precision
STATIONARY = 1e-13  # relative objective decrease per step treated as convergence


@dataclass
class RecoveryConfig:
    n: int = 20
    entry_interval: tuple[float, float] = (0.0, 2.0)
    noise_value: float = 200.0
    noise_prob: float = 0.1
    trials: int = 100
    criterion: float = 1e-4
    seed: int = 0
    # method settings
    mmsr_F: int | None = None
    mmsr_tol: float = 1e-12
    mmsr_max_iter: int = 2000
    pca_step: float | None = None
    pca_iters: int = 3000
    rpca_alpha: float = 1.0
    rpca_iters: int = 1500
    rpca_step: float = 0.1
    rpca_decay: float = 0.99

    def __post_init__(self):
        lo, hi = self.entry_interval
        if not 0 <= lo < hi:
            raise InputError(f"entry interval must satisfy 0 <= lo < hi, got {self.entry_interval}")
        if self.criterion <= 0:
            raise InputError("criterion must be positive")
        if not 0.0 <= self.noise_prob <= 1.0:
            raise InputError("noise_prob must lie in [0, 1]")


@dataclass
class Planted:
    X: ObservedMatrix
    truth: GroundTruth
    noise_mask: np.ndarray


def gen_instance(config: RecoveryConfig, seed) -> Planted:
    """``X = u* v*^T + S`` fully observed; ``S_ij = noise_value`` w.p. ``noise_prob``."""
    rng = np.random.default_rng(seed)
    lo, hi = config.entry_interval
    n = config.n
    # uniform on the interval, but never exactly 0 so the truth stays positive
    u = lo + (hi - lo) * (1.0 - rng.random(n))
    v = lo + (hi - lo) * (1.0 - rng.random(n))
    mask = rng.random((n, n)) < config.noise_prob
    X = np.outer(u, v) + config.noise_value * mask
    return Planted(ObservedMatrix.from_dense(X), GroundTruth(u, v), mask)


def entry_corruption_bound(mask: np.ndarray) -> int:
    """Largest number of corrupted entries in any single row or column."""
    mask = np.asarray(mask, bool)
    if mask.size == 0:
        return 0
    return int(max(mask.sum(axis=0).max(), mask.sum(axis=1).max()))


def _dense(X: ObservedMatrix):
    D = X.dense(0.0)
    W = np.zeros((X.m, X.n))
    W[X.rows, X.cols] = 1.0
    return D, W


def pca_objective(D, W, u, v) -> float:
    R = W * (D - np.outer(u, v))
    return float(np.sum(R * R))


def pca_baseline(X: ObservedMatrix, step=None, iters=3000, seed=0, *, init=None, history=None):
    """Projected gradient descent on ``||P_Omega(X - u v^T)||_F^2`` over the nonnegative orthant.

    ``step`` is the fixed step size, by default ``0.1 / ||X||_F`` (balanced
    factors have squared norm about ``||X||_F``, so this stays well inside
    the stable range).  Both factors move simultaneously from a random
    positive start (or ``init``).  Iteration stops early once the objective
    is zero to working precision or stops decreasing.
    """
    D, W = _dense(X)
    scale = np.linalg.norm(D)
    if scale == 0:
        raise InputError("matrix has zero norm")
    eta = PCA_STEP_SCALE / scale if step is None else step
    if eta <= 0:
        raise InputError(f"step must be positive, got {step}")
    if init is None:
        rng = np.random.default_rng(seed)
        root = np.sqrt(scale / np.sqrt(X.m * X.n))
        u = root * rng.uniform(0.5, 1.5, X.m)
        v = root * rng.uniform(0.5, 1.5, X.n)
    else:
        u, v = np.array(init.u, float), np.array(init.v, float)
    full = bool(W.all())
    prev = np.inf
    for t in range(iters + 1):
        # one residual per iterate serves both the objective and the next gradient
        R = D - np.outer(u, v)
        if not full:
            R *= W
        if t > 0:
            obj = float(np.sum(R * R))
            if history is not None:
                history.append(obj)
            if not np.isfinite(obj) or obj > DIVERGENCE * max(scale**2, 1.0):
                raise NumericalError(f"gradient descent diverged (objective {obj:.3g})")
            if obj <= STALL * scale**2 or t == iters or prev - obj <= STATIONARY * obj:
                break
            prev = obj
        gu = -2.0 * (R @ v)
        gv = -2.0 * (R.T @ u)
        u = np.maximum(u - eta * gu, 0.0)
        v = np.maximum(v - eta * gv, 0.0)
    return FactorPair(u, v)


def rpca_objective(D, W, u, v, alpha) -> float:
    return float(np.sum(np.abs(W * (D - np.outer(u, v)))) + alpha * abs(u @ u - v @ v))


def rpca_baseline(
    X: ObservedMatrix,
    alpha=1.0,
    iters=1500,
    seed=0,
    *,
    step=0.1,
    decay=0.99,
    schedule="geometric",
    init=None,
    history=None,
):
    """Subgradient descent on ``||P_Omega(X - u v^T)||_1 + alpha |u.u - v.v|``.

    Steps move along the normalized subgradient with length
    ``c * decay**t`` (``schedule="geometric"``) or ``c / sqrt(t + 1)``
    (``schedule="sqrt"``), where ``c = step * sqrt(||X||_F)``, a fraction of the
    norm of balanced factors.
    Iterates are projected onto the nonnegative orthant and the best iterate
    seen is returned.
    """
    if alpha < 0:
        raise InputError(f"alpha must be nonnegative, got {alpha}")
    D, W = _dense(X)
    scale = np.linalg.norm(D)
    if scale == 0:
        raise InputError("matrix has zero norm")
    if init is None:
        rng = np.random.default_rng(seed)
        root = np.sqrt(scale / np.sqrt(X.m * X.n))
        u = root * rng.uniform(0.5, 1.5, X.m)
        v = root * rng.uniform(0.5, 1.5, X.n)
    else:
        u, v = np.array(init.u, float), np.array(init.v, float)
    # balanced factors of X have norm about sqrt(||X||_F)
    c = step * np.sqrt(scale)
    full = bool(W.all())
    best = (np.inf, u, v)
    for t in range(iters + 1):
        R = D - np.outer(u, v)
        if not full:
            R *= W
        gap = u @ u - v @ v
        obj = float(np.abs(R).sum() + alpha * abs(gap))
        if t > 0 and history is not None:
            history.append(obj)
        if not np.isfinite(obj) or obj > DIVERGENCE * max(scale, 1.0):
            raise NumericalError(f"subgradient descent diverged (objective {obj:.3g})")
        if obj < best[0]:
            best = (obj, u, v)
        if t == iters:
            break
        S = np.sign(R)
        bal = alpha * np.sign(gap)
        gu = -(S @ v) + 2.0 * bal * u
        gv = -(S.T @ u) - 2.0 * bal * v
        gnorm = np.sqrt(gu @ gu + gv @ gv)
        if gnorm == 0:
            break
        eta = c * (decay**t if schedule == "geometric" else 1.0 / np.sqrt(t + 1))
        u = np.maximum(u - eta * gu / gnorm, 0.0)
        v = np.maximum(v - eta * gv / gnorm, 0.0)
    return FactorPair(best[1], best[2])


def trial_seed(master: int, n: int, noise_prob: float, trial: int) -> int:
    """Stable per-trial seed, independent of execution order."""
    key = f"{master}:{n}:{noise_prob!r}:{trial}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little")


def solve(method: str, planted: Planted, config: RecoveryConfig, seed) -> FactorPair:
    X = planted.X
    if method == "mmsr":
        F = entry_corruption_bound(planted.noise_mask) if config.mmsr_F is None else config.mmsr_F
        v0 = init_row_completion(X, 0, fill=1.0, seed=seed)
        fp, _ = run_mmsr(X, F, v0, max_iter=config.mmsr_max_iter, tol=config.mmsr_tol)
        return fp
    if method == "pca":
        return pca_baseline(X, config.pca_step, config.pca_iters, seed)
    if method == "rpca":
        return rpca_baseline(
            X, config.rpca_alpha, config.rpca_iters, seed, step=config.rpca_step, decay=config.rpca_decay
        )
    raise InputError(f"unknown method {method!r}; choose from {METHODS}")


@dataclass
class CellResult:
    method: str
    n: int
    noise_prob: float
    trials: int
    recovery_rate: float
    mean_seconds: float
    errors: list[float] = field(default_factory=list, repr=False)


def run_cell(method: str, config: RecoveryConfig) -> CellResult:
    errors, seconds = [], []
    for trial in range(config.trials):
        seed = trial_seed(config.seed, config.n, config.noise_prob, trial)
        planted = gen_instance(config, seed)
        start = time.perf_counter()
        try:
            fp = solve(method, planted, config, seed)
            err = reconstruct_error(fp, planted.truth)
        except NumericalError:
            err = np.inf
        seconds.append(time.perf_counter() - start)
        errors.append(err)
    errs = np.asarray(errors)
    return CellResult(
        method,
        config.n,
        config.noise_prob,
        config.trials,
        float(np.mean(errs <= config.criterion)),
        float(np.mean(seconds)),
        errors,
    )


def recovery_sweep(dims, noise_probs, trials, method, seed=0, base: RecoveryConfig | None = None):
    """Recovery rate and mean solve time for every (n, noise_prob) cell, sorted."""
    base = base or RecoveryConfig()
    out = []
    for n in sorted(dims):
        for p in sorted(noise_probs):
            cfg = RecoveryConfig(**{**asdict(base), "n": n, "noise_prob": p, "trials": trials, "seed": seed})
            out.append(run_cell(method, cfg))
    return out
