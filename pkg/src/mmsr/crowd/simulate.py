"""Single-coin Dawid-Skene simulation and group-colluding adversaries."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError
from .labels import MISSING, LabelSet


def skill_to_accuracy(s, M):
    return ((M - 1) * np.asarray(s, float) + 1.0) / M


def accuracy_to_skill(p, M):
    return (M * np.asarray(p, float) - 1.0) / (M - 1)


def _wrong_labels(truth, M, rng):
    return (truth + rng.integers(1, M, size=np.shape(truth))) % M


def simulate_singlecoin(W, T, M, skill_interval=(-0.1, 0.7), obs_sparsity=0.04, seed=0, *, skills=None):
    """Honest crowd: worker i is right with probability p_i, else uniformly wrong.

    Returns ``(labels, truths, skills)`` where skills are drawn uniformly from
    ``skill_interval`` unless given explicitly.
    """
    lo, hi = skill_interval
    if not (-1.0 / (M - 1) - 1e-12 <= lo <= hi <= 1.0 + 1e-12):
        raise InputError(f"skill interval {skill_interval} outside [-1/(M-1), 1] for M={M}")
    if not 0.0 <= obs_sparsity <= 1.0:
        raise InputError(f"obs_sparsity must lie in [0, 1], got {obs_sparsity}")
    rng = np.random.default_rng(seed)
    truths = rng.integers(0, M, size=T)
    if skills is None:
        skills = rng.uniform(lo, hi, size=W)
    else:
        skills = np.asarray(skills, float)
        if skills.shape != (W,):
            raise InputError(f"expected {W} skills, got shape {skills.shape}")
        if np.any(skills < -1.0 / (M - 1) - 1e-12) or np.any(skills > 1.0 + 1e-12):
            raise InputError(f"skills must lie in [-1/(M-1), 1] for M={M}")
    p = skill_to_accuracy(skills, M)
    assigned = rng.random((W, T)) < obs_sparsity
    correct = rng.random((W, T)) < p[:, None]
    answers = np.where(correct, truths[None, :], _wrong_labels(np.broadcast_to(truths, (W, T)), M, rng))
    Y = np.where(assigned, answers, MISSING)
    return LabelSet.from_matrix(Y, M), truths, skills


@dataclass
class AdversarySpec:
    count: int = 20
    groups: int = 5
    accuracy: float = 0.3
    obs_sparsity: float = 0.4
    # (source group, mirror group): the mirror answers right exactly where the source is wrong
    colluding_pairs: list[tuple[int, int]] = field(default_factory=list)
    group_sizes: list[int] | None = None

    def __post_init__(self):
        if self.count < 0:
            raise InputError("adversary count must be nonnegative")
        if self.count and not 1 <= self.groups <= self.count:
            raise InputError(f"need 1 <= groups <= count, got groups={self.groups}, count={self.count}")
        for name in ("accuracy", "obs_sparsity"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InputError(f"{name} must lie in [0, 1]")
        if self.group_sizes is not None:
            if len(self.group_sizes) != self.groups or sum(self.group_sizes) != self.count:
                raise InputError("group_sizes must have one entry per group and sum to count")


def _answer_set(truths, accuracy, M, rng):
    T = truths.size
    n_right = int(round(accuracy * T))
    right = np.zeros(T, dtype=bool)
    right[rng.choice(T, size=n_right, replace=False)] = True
    return np.where(right, truths, _wrong_labels(truths, M, rng))


def _mirror(source, truths, M, rng):
    flipped = np.where(source == truths, _wrong_labels(truths, M, rng), truths)
    return flipped


def inject_adversaries(labels: LabelSet, truths, spec: AdversarySpec, seed=0):
    """Replace ``spec.count`` random workers by identical-answer adversary groups.

    Returns the new label set and the sorted array of adversary ids.
    """
    if spec.count > labels.W:
        raise InputError(f"cannot corrupt {spec.count} of {labels.W} workers")
    truths = np.asarray(truths)
    rng = np.random.default_rng(seed)
    adversaries = np.sort(rng.choice(labels.W, size=spec.count, replace=False))
    Y = labels.matrix()
    if spec.count == 0:
        return labels, adversaries
    Y[adversaries] = MISSING

    shuffled = rng.permutation(adversaries)
    if spec.group_sizes is None:
        members = np.array_split(shuffled, spec.groups)
    else:
        members = np.split(shuffled, np.cumsum(spec.group_sizes)[:-1])
    answer_sets = [_answer_set(truths, spec.accuracy, labels.M, rng) for _ in members]
    for src, dst in spec.colluding_pairs:
        answer_sets[dst] = _mirror(answer_sets[src], truths, labels.M, rng)

    for group, answers in zip(members, answer_sets):
        for w in group:
            take = rng.random(labels.T) < spec.obs_sparsity
            Y[w, take] = answers[take]
    return LabelSet.from_matrix(Y, labels.M), adversaries
