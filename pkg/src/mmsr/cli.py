"""Command-line interface.

Subcommands: ``complete``, ``robustness``, ``crowd-sim``, ``crowd-predict`` and
``recovery-sweep``.  Each writes a JSON result document (see ``RunResult``)
and exits with 0 on success, 2 on bad input, 3 when a request exceeds what is
supported and 4 on numerical failure.

Settings come from built-in defaults, then an optional flat JSON config file
(``--config``), then explicit flags, later sources winning.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .crowd import experiment
from .crowd.experiment import CrowdConfig
from .errors import InputError, MMSRError, NumericalError
from .graph import BRUTE_FORCE_LIMIT, is_r_robust, robustness_witness, vertex_connectivity
from .recovery import METHODS as RECOVERY_METHODS
from .recovery import RecoveryConfig, recovery_sweep
from .solver import DEFAULT_MAX_ITER, DEFAULT_TOL, init_row_completion, run_mmsr

SCHEMA_VERSION = 1
log = logging.getLogger("mmsr")


@dataclass
class RunResult:
    command: str
    config: dict
    metrics: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    wall_seconds: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_jsonable) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunResult":
        d = json.loads(text)
        if d.get("schema_version") != SCHEMA_VERSION:
            raise InputError(f"unsupported result schema version {d.get('schema_version')!r}")
        return cls(**d)


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, tuple)):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    if not isinstance(cfg, dict):
        raise InputError(f"{path}: config must be a JSON object")
    for k, v in cfg.items():
        if isinstance(v, dict):
            raise InputError(f"{path}: config must be flat, key {k!r} holds an object")
    return cfg


def _resolve(defaults: dict, args, keys) -> dict:
    """Defaults, then the config file, then flags that were given explicitly."""
    cfg = dict(defaults)
    file_cfg = _load_config(getattr(args, "config", None))
    unknown = set(file_cfg) - set(defaults)
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    cfg.update(file_cfg)
    for k in keys:
        val = getattr(args, k, None)
        if val is not None:
            cfg[k] = val
    return cfg


def _csv_list(kind):
    def parse(text):
        try:
            return [kind(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated {kind.__name__} values, got {text!r}")

    return parse


def _out_dir(args) -> Path:
    return io.ensure_dir(args.out)


# -- commands -----------------------------------------------------------------


def cmd_complete(args) -> RunResult:
    defaults = {"F": 0, "v0": "ones", "v0_row": 0, "max_iter": DEFAULT_MAX_ITER, "tol": DEFAULT_TOL, "seed": 0}
    cfg = _resolve(defaults, args, defaults)
    X = io.read_matrix(args.matrix)
    try:
        X.check_positive()
    except NumericalError as exc:
        raise InputError(f"{args.matrix}: {exc}") from None
    if cfg["v0"] == "ones":
        v0 = None
    elif cfg["v0"] == "row":
        v0 = init_row_completion(X, int(cfg["v0_row"]), seed=int(cfg["seed"]))
    else:
        raise InputError(f"v0 must be 'ones' or 'row', got {cfg['v0']!r}")
    fp, report = run_mmsr(X, int(cfg["F"]), v0, max_iter=int(cfg["max_iter"]), tol=float(cfg["tol"]))
    out = _out_dir(args)
    io.write_vector(fp.u, out / "u.txt")
    io.write_vector(fp.v, out / "v.txt")
    io.write_dense(fp.reconstruction(), out / "reconstruction.txt")
    observed = fp.u[X.rows] * fp.v[X.cols]
    resid = float(np.max(np.abs(observed - X.vals) / X.vals)) if X.vals.size else 0.0
    metrics = {
        "converged": report.converged,
        "iterations": report.iterations,
        "final_change": report.final_change,
        "over_trimmed": report.over_trimmed,
        "max_relative_residual": resid,
        "m": X.m,
        "n": X.n,
        "observed": int(X.vals.size),
    }
    cfg["matrix"] = str(args.matrix)
    return RunResult("complete", cfg, metrics, list(report.warnings))


def cmd_robustness(args) -> RunResult:
    defaults = {"r": 1, "limit": BRUTE_FORCE_LIMIT, "seed": 0}
    cfg = _resolve(defaults, args, defaults)
    graph = io.read_graph(args.graph)
    r, limit = int(cfg["r"]), int(cfg["limit"])
    witness = robustness_witness(graph, r, limit)
    metrics = {
        "r": r,
        "robust": witness is None,
        "vertex_connectivity": vertex_connectivity(graph, limit),
        "vertices": graph.num_vertices,
        "edges": len(graph.edges),
    }
    if witness is not None:
        metrics["witness"] = [sorted([list(v) for v in s]) for s in witness]
    cfg["graph"] = str(args.graph)
    return RunResult("robustness", cfg, metrics)


def cmd_crowd_sim(args) -> RunResult:
    defaults = {**CrowdConfig().to_dict(), "sweep_key": None, "sweep_values": None, "methods": list(experiment.METHODS)}
    keys = list(defaults)
    cfg = _resolve(defaults, args, keys)
    methods = cfg.pop("methods")
    sweep_key, sweep_values = cfg.pop("sweep_key"), cfg.pop("sweep_values")
    crowd = CrowdConfig.from_dict(cfg)
    out = _out_dir(args)

    labels, truths, adv = experiment.simulate(crowd, crowd.seed)
    io.write_labels(labels, out / "labels.csv")
    io.write_truth(truths, out / "truth.csv")

    metrics: dict = {"adversary_ids": adv.tolist()}
    if sweep_key is None:
        res = experiment.run_repeats(crowd, methods)
        metrics["errors"] = {m: {"mean": v["mean"], "std": v["std"]} for m, v in res.items()}
    else:
        if not sweep_values:
            raise InputError("sweep_key given without sweep_values")
        rows = experiment.sweep(crowd, sweep_key, sweep_values, methods)
        metrics["sweep"] = rows
        with open(out / "sweep.csv", "w") as fh:
            fh.write("key,value,method,mean_error,std_error\n")
            for row in rows:
                fh.write(f"{row['key']},{row['value']!r},{row['method']},{row['mean']!r},{row['std']!r}\n")
    full = {**crowd.to_dict(), "methods": methods, "sweep_key": sweep_key, "sweep_values": sweep_values}
    return RunResult("crowd-sim", full, metrics)


def cmd_crowd_predict(args) -> RunResult:
    defaults = {"method": "mmsr", "F": 1, "N_min": 1, "classes": None, "pgd_iters": 500, "seed": 0}
    cfg = _resolve(defaults, args, defaults)
    if cfg["method"] not in experiment.METHODS:
        raise InputError(f"unknown method {cfg['method']!r}; choose from {experiment.METHODS}")
    lf = io.read_labels(args.labels, cfg["classes"])
    labels = lf.labels
    crowd = CrowdConfig(classes=labels.M, F=int(cfg["F"]), N_min=int(cfg["N_min"]), pgd_iters=int(cfg["pgd_iters"]))
    est = experiment.skills_by(cfg["method"], labels, crowd)
    pred = experiment.predict(cfg["method"], labels, crowd)
    out = _out_dir(args)
    io.write_predictions(pred, out / "predictions.csv", lf.task_ids)
    if est is not None:
        io.write_skills(est, out / "skills.csv", lf.worker_ids)
    with open(out / "ids.json", "w") as fh:
        json.dump({"workers": lf.worker_ids, "tasks": lf.task_ids}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    metrics = {"workers": labels.W, "tasks": labels.T, "classes": labels.M, "labels": len(labels)}
    warnings = []
    if args.truth is not None:
        truth = io.read_truth(args.truth, lf.task_ids, labels.T)
        known = truth >= 0
        if not known.any():
            warnings.append("truth file shares no tasks with the labels")
        else:
            metrics["prediction_error"] = float(np.mean(pred[known] != truth[known]))
            metrics["evaluated_tasks"] = int(known.sum())
    if est is not None:
        metrics["flagged_workers"] = int(np.count_nonzero(est.flagged)) if est.flagged is not None else 0
        warnings.extend(est.info.get("mmsr_warnings", []))
    cfg["classes"] = labels.M
    cfg["labels"] = str(args.labels)
    cfg["truth"] = None if args.truth is None else str(args.truth)
    return RunResult("crowd-predict", cfg, metrics, warnings)


def cmd_recovery_sweep(args) -> RunResult:
    base = asdict(RecoveryConfig())
    for k in ("n", "noise_prob"):
        base.pop(k)
    defaults = {**base, "dims": [10, 20, 40], "noise_probs": [0.0, 0.1, 0.2, 0.3], "methods": ["mmsr"]}
    cfg = _resolve(defaults, args, defaults)
    for m in cfg["methods"]:
        if m not in RECOVERY_METHODS:
            raise InputError(f"unknown method {m!r}; choose from {RECOVERY_METHODS}")
    settings = {k: cfg[k] for k in base}
    settings["entry_interval"] = tuple(settings["entry_interval"])
    template = RecoveryConfig(**settings)
    cells = []
    for m in sorted(cfg["methods"]):
        cells.extend(recovery_sweep(cfg["dims"], cfg["noise_probs"], int(cfg["trials"]), m, int(cfg["seed"]), template))
    out = _out_dir(args)
    io.write_sweep(cells, out / "sweep.csv")
    metrics = {
        "cells": [
            {k: getattr(c, k) for k in ("method", "n", "noise_prob", "trials", "recovery_rate", "mean_seconds")}
            for c in cells
        ]
    }
    return RunResult("recovery-sweep", cfg, metrics)


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mmsr", description="Robust rank-one matrix completion (M-MSR) tools.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default):
        sp.add_argument("--config", help="flat JSON file of settings")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", default=out_default, help="output directory")

    sp = sub.add_parser("complete", help="complete a positive matrix file")
    sp.add_argument("matrix")
    sp.add_argument("--F", type=int)
    sp.add_argument("--v0", choices=["ones", "row"])
    sp.add_argument("--v0-row", dest="v0_row", type=int)
    sp.add_argument("--max-iter", dest="max_iter", type=int)
    sp.add_argument("--tol", type=float)
    common(sp, "mmsr-out")
    sp.set_defaults(func=cmd_complete)

    sp = sub.add_parser("robustness", help="exhaustive r-robustness check of a graph file")
    sp.add_argument("graph")
    sp.add_argument("--r", type=int)
    sp.add_argument("--limit", type=int, help="largest vertex count to enumerate")
    common(sp, "mmsr-out")
    sp.set_defaults(func=cmd_robustness)

    sp = sub.add_parser("crowd-sim", help="simulated crowdsourcing with adversaries")
    for f in CrowdConfig.__dataclass_fields__.values():
        if f.name in ("seed", "colluding_pairs"):
            continue
        kind = f.type if f.type in ("int", "float") else None
        sp.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, type={"int": int, "float": float}.get(kind))
    sp.add_argument("--sweep-key", dest="sweep_key")
    sp.add_argument("--sweep-values", dest="sweep_values", type=_csv_list(float))
    sp.add_argument("--methods", type=_csv_list(str))
    common(sp, "mmsr-out")
    sp.set_defaults(func=cmd_crowd_sim)

    sp = sub.add_parser("crowd-predict", help="aggregate a label CSV")
    sp.add_argument("labels")
    sp.add_argument("--truth")
    sp.add_argument("--method", choices=list(experiment.METHODS))
    sp.add_argument("--F", type=int)
    sp.add_argument("--N-min", dest="N_min", type=int)
    sp.add_argument("--classes", type=int)
    sp.add_argument("--pgd-iters", dest="pgd_iters", type=int)
    common(sp, "mmsr-out")
    sp.set_defaults(func=cmd_crowd_predict)

    sp = sub.add_parser("recovery-sweep", help="exact-recovery rate grid")
    sp.add_argument("--dims", type=_csv_list(int))
    sp.add_argument("--noise-probs", dest="noise_probs", type=_csv_list(float))
    sp.add_argument("--trials", type=int)
    sp.add_argument("--methods", type=_csv_list(str))
    sp.add_argument("--criterion", type=float)
    common(sp, "mmsr-out")
    sp.set_defaults(func=cmd_recovery_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        result = args.func(args)
    except MMSRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: no such file", file=sys.stderr)
        return InputError.exit_code
    result.wall_seconds = time.perf_counter() - start
    text = result.to_json()
    (io.ensure_dir(args.out) / "result.json").write_text(text)
    print(text, end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
