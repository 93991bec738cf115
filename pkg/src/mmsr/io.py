"""Plain-text file formats.

- graph file: first line ``m n``, then one ``i j`` edge per line (0-indexed).
- matrix file: first line ``m n``, then ``i j value`` per revealed entry.
- label CSV: header ``worker_id,task_id,label``.
- truth CSV: header ``task_id,label``.
- skill report CSV: ``worker_id,s,p,weight,flagged``.
- sweep CSV: ``method,n,noise_prob,trials,recovery_rate,mean_seconds``.

Parse errors raise :class:`InputError` with the file name and line number.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .crowd.labels import LabelSet
from .errors import InputError
from .graph import BipartiteGraph, build_graph
from .solver import ObservedMatrix

LABEL_HEADER = ["worker_id", "task_id", "label"]
TRUTH_HEADER = ["task_id", "label"]
SKILL_HEADER = ["worker_id", "s", "p", "weight", "flagged"]
PREDICTION_HEADER = ["task_id", "label"]
SWEEP_HEADER = ["method", "n", "noise_prob", "trials", "recovery_rate", "mean_seconds"]


def _lines(path):
    """Yield ``(lineno, fields)`` for non-blank, non-comment lines."""
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split()


def _header(path, it):
    try:
        lineno, fields = next(it)
    except StopIteration:
        raise InputError(f"{path}: empty file, expected 'm n' header") from None
    try:
        m, n = (int(x) for x in fields)
    except ValueError:
        raise InputError(f"{path}:{lineno}: expected 'm n', got {' '.join(fields)!r}") from None
    if m < 0 or n < 0:
        raise InputError(f"{path}:{lineno}: dimensions must be nonnegative")
    return m, n


def _index(path, lineno, tok, bound, what):
    try:
        k = int(tok)
    except ValueError:
        raise InputError(f"{path}:{lineno}: {what} {tok!r} is not an integer") from None
    if not 0 <= k < bound:
        raise InputError(f"{path}:{lineno}: {what} {k} out of range [0, {bound})")
    return k


def read_graph(path) -> BipartiteGraph:
    it = _lines(path)
    m, n = _header(path, it)
    edges = []
    seen = set()
    for lineno, fields in it:
        if len(fields) != 2:
            raise InputError(f"{path}:{lineno}: expected 'i j', got {len(fields)} fields")
        e = (_index(path, lineno, fields[0], m, "row"), _index(path, lineno, fields[1], n, "column"))
        if e in seen:
            raise InputError(f"{path}:{lineno}: duplicate edge {e}")
        seen.add(e)
        edges.append(e)
    return build_graph(m, n, edges)


def write_graph(graph: BipartiteGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{graph.m} {graph.n}\n")
        for i, j in sorted(graph.edges):
            fh.write(f"{i} {j}\n")


def read_matrix(path) -> ObservedMatrix:
    it = _lines(path)
    m, n = _header(path, it)
    entries = {}
    for lineno, fields in it:
        if len(fields) != 3:
            raise InputError(f"{path}:{lineno}: expected 'i j value', got {len(fields)} fields")
        i = _index(path, lineno, fields[0], m, "row")
        j = _index(path, lineno, fields[1], n, "column")
        try:
            x = float(fields[2])
        except ValueError:
            raise InputError(f"{path}:{lineno}: value {fields[2]!r} is not a number") from None
        if not np.isfinite(x):
            raise InputError(f"{path}:{lineno}: value for entry ({i}, {j}) is not finite")
        if (i, j) in entries:
            raise InputError(f"{path}:{lineno}: duplicate entry ({i}, {j})")
        entries[(i, j)] = x
    return ObservedMatrix.from_entries(m, n, entries)


def write_matrix(X: ObservedMatrix, path) -> None:
    # repr gives the shortest decimal that round-trips
    with open(path, "w") as fh:
        fh.write(f"{X.m} {X.n}\n")
        for i, j, x in zip(X.rows.tolist(), X.cols.tolist(), X.vals.tolist()):
            fh.write(f"{i} {j} {x!r}\n")


def write_vector(x, path) -> None:
    with open(path, "w") as fh:
        for val in np.asarray(x, float).tolist():
            fh.write(f"{val!r}\n")


def write_dense(A, path) -> None:
    with open(path, "w") as fh:
        for row in np.asarray(A, float).tolist():
            fh.write(" ".join(repr(x) for x in row) + "\n")


def _csv_rows(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file, expected header {','.join(header)}") from None
        if [h.strip() for h in first] != header:
            raise InputError(f"{path}:1: expected header {','.join(header)}, got {','.join(first)}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(
                    f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}"
                )
            yield reader.line_num, [c.strip() for c in row]


def _id_map(raw: list[str]) -> dict[str, int]:
    """Integer ids map to themselves; otherwise sorted strings map to 0, 1, ..."""
    try:
        ints = [int(x) for x in raw]
    except ValueError:
        return {s: k for k, s in enumerate(sorted(set(raw)))}
    if ints and min(ints) < 0:
        return {s: k for k, s in enumerate(sorted(set(raw)))}
    return {s: int(s) for s in raw}


@dataclass
class LabelFile:
    labels: LabelSet
    worker_ids: dict[str, int] = field(default_factory=dict)
    task_ids: dict[str, int] = field(default_factory=dict)


def read_labels(path, M: int | None = None) -> LabelFile:
    """Read a label CSV; M defaults to one more than the largest label."""
    raw = []
    for lineno, (w, t, y) in _csv_rows(path, LABEL_HEADER):
        try:
            label = int(y)
        except ValueError:
            raise InputError(f"{path}:{lineno}: label {y!r} is not an integer") from None
        if label < 0:
            raise InputError(f"{path}:{lineno}: label {label} is negative")
        if not w or not t:
            raise InputError(f"{path}:{lineno}: empty worker or task id")
        raw.append((lineno, w, t, label))
    if not raw:
        raise InputError(f"{path}: no labels")
    wmap = _id_map([r[1] for r in raw])
    tmap = _id_map([r[2] for r in raw])
    seen = {}
    for lineno, w, t, _ in raw:
        key = (wmap[w], tmap[t])
        if key in seen:
            raise InputError(f"{path}:{lineno}: worker {w} labels task {t} twice (first on line {seen[key]})")
        seen[key] = lineno
    top = max(r[3] for r in raw)
    if M is None:
        M = max(top + 1, 2)
    elif top >= M:
        line = next(r[0] for r in raw if r[3] >= M)
        raise InputError(f"{path}:{line}: label outside [0, {M})")
    W = max(wmap.values()) + 1
    T = max(tmap.values()) + 1
    triples = [(wmap[w], tmap[t], y) for _, w, t, y in raw]
    return LabelFile(LabelSet.from_triples(W, T, M, triples), wmap, tmap)


def write_labels(labels: LabelSet, path) -> None:
    order = np.lexsort((labels.tasks, labels.workers))
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(LABEL_HEADER)
        for k in order:
            out.writerow([int(labels.workers[k]), int(labels.tasks[k]), int(labels.labels[k])])


def read_truth(path, task_ids: dict[str, int] | None = None, T: int | None = None) -> np.ndarray:
    """Truth labels indexed by task; tasks absent from the file get -1."""
    pairs = []
    for lineno, (t, y) in _csv_rows(path, TRUTH_HEADER):
        try:
            label = int(y)
        except ValueError:
            raise InputError(f"{path}:{lineno}: label {y!r} is not an integer") from None
        if task_ids is not None:
            if t not in task_ids:
                continue  # task nobody labeled
            k = task_ids[t]
        else:
            k = _index(path, lineno, t, T if T is not None else 2**62, "task id")
        pairs.append((k, label))
    size = T if T is not None else (max((k for k, _ in pairs), default=-1) + 1)
    truth = np.full(size, -1, dtype=np.int64)
    for k, label in pairs:
        if k < size:
            truth[k] = label
    return truth


def write_truth(truth, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(TRUTH_HEADER)
        for t, y in enumerate(np.asarray(truth).tolist()):
            out.writerow([t, y])


def write_predictions(pred, path, task_ids: dict[str, int] | None = None) -> None:
    names = _inverse(task_ids, len(pred))
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(PREDICTION_HEADER)
        for t, y in enumerate(np.asarray(pred).tolist()):
            out.writerow([names[t], y])


def _inverse(ids, size):
    names = [str(k) for k in range(size)]
    for name, k in (ids or {}).items():
        names[k] = name
    return names


def write_skills(est, path, worker_ids: dict[str, int] | None = None) -> None:
    names = _inverse(worker_ids, est.s.size)
    flagged = est.flagged if est.flagged is not None else np.zeros(est.s.size, bool)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(SKILL_HEADER)
        for k in range(est.s.size):
            out.writerow(
                [names[k], repr(float(est.s[k])), repr(float(est.p[k])), repr(float(est.weights[k])), int(flagged[k])]
            )


def write_sweep(cells, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(SWEEP_HEADER)
        for c in sorted(cells, key=lambda c: (c.method, c.n, c.noise_prob)):
            out.writerow([c.method, c.n, repr(c.noise_prob), c.trials, repr(c.recovery_rate), repr(c.mean_seconds)])


def read_sweep(path) -> list[dict]:
    rows = []
    for lineno, (method, n, p, trials, rate, secs) in _csv_rows(path, SWEEP_HEADER):
        try:
            rows.append(
                dict(method=method, n=int(n), noise_prob=float(p), trials=int(trials),
                     recovery_rate=float(rate), mean_seconds=float(secs))
            )
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
    return rows


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
