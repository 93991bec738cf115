import json

import numpy as np
import pytest

from mmsr import io
from mmsr.cli import RunResult, main
from mmsr.crowd.experiment import CrowdConfig, predict, simulate
from mmsr.pools import complete_bipartite


def run(args, capsys=None):
    code = main([str(a) for a in args])
    if capsys is not None:
        capsys.readouterr()
    return code


def result(out):
    return json.loads((out / "result.json").read_text())


def test_complete_all_ones(tmp_path, capsys):
    (tmp_path / "x.txt").write_text("2 2\n0 0 1\n0 1 1\n1 0 1\n1 1 1\n")
    out = tmp_path / "out"
    assert run(["complete", tmp_path / "x.txt", "--F", 0, "--out", out], capsys) == 0
    res = result(out)
    assert res["metrics"]["converged"] is True
    assert np.allclose(np.loadtxt(out / "reconstruction.txt"), 1.0)
    # every resolved default is echoed
    assert set(res["config"]) >= {"F", "v0", "v0_row", "max_iter", "tol", "seed"}


def test_complete_nonpositive_value(tmp_path, capsys):
    (tmp_path / "x.txt").write_text("2 2\n0 0 1\n0 1 -2\n1 0 1\n")
    code = main(["complete", str(tmp_path / "x.txt"), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "(0, 1)" in capsys.readouterr().err


def test_complete_parse_error_line(tmp_path, capsys):
    (tmp_path / "x.txt").write_text("2 2\n0 0 1\n0 q 1\n")
    assert main(["complete", str(tmp_path / "x.txt"), "--out", str(tmp_path / "o")]) == 2
    assert "x.txt:3:" in capsys.readouterr().err


def test_complete_deterministic(tmp_path, capsys):
    rng = np.random.default_rng(3)
    X = np.outer(rng.uniform(0.5, 2, 5), rng.uniform(0.5, 2, 6))
    X[1, 2] = 50.0
    lines = ["5 6"] + [f"{i} {j} {float(X[i, j])!r}" for i in range(5) for j in range(6)]
    (tmp_path / "x.txt").write_text("\n".join(lines) + "\n")
    for name in ("a", "b"):
        args = ["complete", tmp_path / "x.txt", "--F", 1, "--v0", "row", "--seed", 4, "--out", tmp_path / name]
        assert run(args, capsys) == 0
    for f in ("u.txt", "v.txt", "reconstruction.txt"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_robustness_k22(tmp_path, capsys):
    io.write_graph(complete_bipartite(2, 2), tmp_path / "g.txt")
    assert run(["robustness", tmp_path / "g.txt", "--r", 2, "--out", tmp_path], capsys) == 0
    m = result(tmp_path)["metrics"]
    assert m["robust"] is False and len(m["witness"]) == 2
    assert m["vertex_connectivity"] == 2


def test_robustness_single_edge(tmp_path, capsys):
    io.write_graph(complete_bipartite(1, 1), tmp_path / "g.txt")
    assert run(["robustness", tmp_path / "g.txt", "--r", 1, "--out", tmp_path], capsys) == 0
    assert result(tmp_path)["metrics"]["robust"] is True


def test_robustness_oversize(tmp_path, capsys):
    io.write_graph(complete_bipartite(9, 9), tmp_path / "g.txt")
    assert run(["robustness", tmp_path / "g.txt", "--r", 2, "--out", tmp_path], capsys) == 3


def test_crowd_predict_matches_in_memory(tmp_path, capsys):
    cfg = CrowdConfig(workers=30, tasks=300, adversaries=6, adv_groups=2, obs_sparsity=0.1)
    labels, truths, _ = simulate(cfg, 5)
    io.write_labels(labels, tmp_path / "labels.csv")
    io.write_truth(truths, tmp_path / "truth.csv")
    out = tmp_path / "out"
    args = ["crowd-predict", tmp_path / "labels.csv", "--truth", tmp_path / "truth.csv", "--out", out]
    assert run(args, capsys) == 0
    got = np.loadtxt(out / "predictions.csv", delimiter=",", skiprows=1, dtype=int)[:, 1]
    expected = predict("mmsr", labels, cfg)
    # trailing tasks nobody labeled are not in the file
    assert np.array_equal(got, expected[: got.size])
    labeled = np.unique(labels.tasks)
    err = np.mean(expected[labeled] != truths[labeled])
    assert result(out)["metrics"]["prediction_error"] == pytest.approx(err)
    header = (out / "skills.csv").read_text().splitlines()[0]
    assert header == "worker_id,s,p,weight,flagged"


def test_crowd_predict_without_truth(tmp_path, capsys):
    (tmp_path / "l.csv").write_text("worker_id,task_id,label\n0,0,1\n1,0,1\n0,1,0\n1,1,0\n")
    assert run(["crowd-predict", tmp_path / "l.csv", "--F", 0, "--out", tmp_path], capsys) == 0
    assert "prediction_error" not in result(tmp_path)["metrics"]


def test_crowd_predict_malformed_row(tmp_path, capsys):
    (tmp_path / "l.csv").write_text("worker_id,task_id,label\n0,0,1\n1,0\n")
    assert main(["crowd-predict", str(tmp_path / "l.csv"), "--out", str(tmp_path)]) == 2
    assert "l.csv:3:" in capsys.readouterr().err


def test_crowd_sim_sweep_rows(tmp_path, capsys):
    args = ["crowd-sim", "--workers", 20, "--tasks", 100, "--adversaries", 4, "--adv-groups", 2,
            "--repeats", 1, "--sweep-key", "adversaries", "--sweep-values", "0,4",
            "--methods", "mv,mmsr", "--out", tmp_path]
    assert run(args, capsys) == 0
    rows = result(tmp_path)["metrics"]["sweep"]
    assert len(rows) == 4
    assert (tmp_path / "sweep.csv").read_text().splitlines()[0] == "key,value,method,mean_error,std_error"
    assert (tmp_path / "labels.csv").exists() and (tmp_path / "truth.csv").exists()


def test_crowd_sim_config_file(tmp_path, capsys):
    (tmp_path / "c.json").write_text(json.dumps({"workers": 20, "tasks": 80, "adversaries": 2, "adv_groups": 1, "repeats": 1}))
    args = ["crowd-sim", "--config", tmp_path / "c.json", "--tasks", 60, "--methods", "mv", "--out", tmp_path]
    assert run(args, capsys) == 0
    cfg = result(tmp_path)["config"]
    # explicit flags override the file, the file overrides defaults
    assert (cfg["workers"], cfg["tasks"], cfg["skill_hi"]) == (20, 60, 0.7)


def test_recovery_sweep_grid(tmp_path, capsys):
    args = ["recovery-sweep", "--dims", "6,10", "--noise-probs", "0,0.1", "--trials", 5, "--out", tmp_path]
    assert run(args, capsys) == 0
    rows = io.read_sweep(tmp_path / "sweep.csv")
    assert len(rows) == 4
    assert [r["recovery_rate"] for r in rows if r["noise_prob"] == 0.0] == [1.0, 1.0]
    assert (tmp_path / "sweep.csv").read_text().splitlines()[0] == ",".join(io.SWEEP_HEADER)


def test_recovery_sweep_mmsr_beats_pca(tmp_path, capsys):
    args = ["recovery-sweep", "--dims", 20, "--noise-probs", 0.2, "--trials", 5, "--methods", "mmsr,pca", "--out", tmp_path]
    assert run(args, capsys) == 0
    rate = {r["method"]: r["recovery_rate"] for r in io.read_sweep(tmp_path / "sweep.csv")}
    assert rate["mmsr"] > rate["pca"]


def test_recovery_sweep_is_reproducible(tmp_path, capsys):
    for name in ("a", "b"):
        args = ["recovery-sweep", "--dims", 8, "--noise-probs", "0.1", "--trials", 3, "--seed", 9, "--out", tmp_path / name]
        assert run(args, capsys) == 0
    a = [r["recovery_rate"] for r in io.read_sweep(tmp_path / "a" / "sweep.csv")]
    b = [r["recovery_rate"] for r in io.read_sweep(tmp_path / "b" / "sweep.csv")]
    assert a == b


def test_missing_file(tmp_path, capsys):
    assert main(["complete", str(tmp_path / "nope.txt"), "--out", str(tmp_path)]) == 2


def test_result_json_roundtrip():
    r = RunResult("complete", {"F": 1}, {"converged": True}, ["w"], 0.5)
    assert RunResult.from_json(r.to_json()) == r
