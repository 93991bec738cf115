"""Synthetic crowdsourcing experiments: one config in, per-method prediction errors out."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from ..errors import InputError
from .agreement import EPS_FLOOR, agreement_matrix
from .labels import LabelSet
from .pgd import pgd_skills
from .predict import predict_majority, predict_weighted, prediction_error
from .simulate import AdversarySpec, inject_adversaries, simulate_singlecoin
from .skills import SkillEstimate, estimate_skills, skill_estimate_from

METHODS = ("mmsr", "mv", "pgd")


@dataclass
class CrowdConfig:
    """Simulation and estimation settings; defaults are the standard synthetic benchmark."""

    workers: int = 80
    tasks: int = 1600
    classes: int = 2
    skill_lo: float = -0.1
    skill_hi: float = 0.7
    obs_sparsity: float = 0.04
    adversaries: int = 20
    adv_groups: int = 5
    adv_accuracy: float = 0.3
    adv_obs_sparsity: float = 0.4
    colluding_pairs: list = field(default_factory=list)
    F: int = 1
    N_min: int = 1
    eps_floor: float = EPS_FLOOR
    pgd_iters: int = 500
    repeats: int = 20
    seed: int = 0

    def adversary_spec(self) -> AdversarySpec:
        return AdversarySpec(
            count=self.adversaries,
            groups=self.adv_groups,
            accuracy=self.adv_accuracy,
            obs_sparsity=self.adv_obs_sparsity,
            colluding_pairs=[tuple(p) for p in self.colluding_pairs],
        )

    @classmethod
    def from_dict(cls, d: dict) -> "CrowdConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InputError(f"unknown crowd config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def skills_by(method: str, labels: LabelSet, cfg: CrowdConfig) -> SkillEstimate | None:
    if method == "mmsr":
        return estimate_skills(labels, cfg.F, N_min=cfg.N_min, eps_floor=cfg.eps_floor)
    if method == "pgd":
        x = pgd_skills(agreement_matrix(labels, cfg.N_min), labels.M, iters=cfg.pgd_iters)
        return skill_estimate_from(x, labels.M, labels.tasks_per_worker())
    if method == "mv":
        return None
    raise InputError(f"unknown method {method!r}; choose from {METHODS}")


def predict(method: str, labels: LabelSet, cfg: CrowdConfig) -> np.ndarray:
    est = skills_by(method, labels, cfg)
    if est is None:
        return predict_majority(labels)
    return predict_weighted(labels, est.weights)


def simulate(cfg: CrowdConfig, seed: int):
    """Honest crowd plus adversaries; returns ``(labels, truths, adversary ids)``."""
    labels, truths, _ = simulate_singlecoin(
        cfg.workers, cfg.tasks, cfg.classes, (cfg.skill_lo, cfg.skill_hi), cfg.obs_sparsity, seed
    )
    # the adversary stream gets its own seed so changing the attack keeps the honest crowd fixed
    child = int(np.random.SeedSequence([seed, 1]).generate_state(1)[0])
    labels, adv = inject_adversaries(labels, truths, cfg.adversary_spec(), child)
    return labels, truths, adv


def run_once(cfg: CrowdConfig, seed: int, methods=METHODS) -> dict[str, float]:
    labels, truths, _ = simulate(cfg, seed)
    return {m: prediction_error(predict(m, labels, cfg), truths) for m in methods}


def repeat_seeds(cfg: CrowdConfig) -> list[int]:
    return [cfg.seed + r for r in range(cfg.repeats)]


def run_repeats(cfg: CrowdConfig, methods=METHODS) -> dict[str, dict[str, float]]:
    """Mean and standard deviation of each method's error over ``cfg.repeats`` seeds."""
    errs = {m: [] for m in methods}
    for seed in repeat_seeds(cfg):
        for m, e in run_once(cfg, seed, methods).items():
            errs[m].append(e)
    return {m: {"mean": float(np.mean(v)), "std": float(np.std(v)), "errors": v} for m, v in errs.items()}


def sweep(cfg: CrowdConfig, key: str, values, methods=METHODS) -> list[dict]:
    """Vary one config key; one row per (value, method)."""
    types = {f.name: f.type for f in fields(CrowdConfig)}
    if key not in types:
        raise InputError(f"cannot sweep unknown key {key!r}")
    if types[key] == "int":
        if any(float(v) != int(v) for v in values):
            raise InputError(f"{key} takes integer values, got {list(values)}")
        values = [int(v) for v in values]
    rows = []
    for value in values:
        res = run_repeats(replace(cfg, **{key: value}), methods)
        for m in methods:
            rows.append({"key": key, "value": value, "method": m, "mean": res[m]["mean"], "std": res[m]["std"]})
    return rows
