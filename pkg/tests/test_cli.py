import json

import numpy as np
import pytest

from rankshap.cli import main


@pytest.fixture
def workspace(tmp_path):
    rng = np.random.default_rng(0)
    lines = []
    for q in range(3):
        for _ in range(4):
            feats = " ".join(f"{k + 1}:{rng.normal():.6f}" for k in range(5))
            lines.append(f"{rng.integers(0, 3)} qid:q{q} {feats}")
    data = tmp_path / "data.txt"
    data.write_text("\n".join(lines))
    scorer = tmp_path / "scorer.json"
    scorer.write_text(json.dumps({"kind": "linear", "weights": [1.0, -0.5, 0.25, 2.0, 0.1]}))
    return tmp_path, data, scorer


def test_explain_writes_per_query_files(workspace):
    tmp, data, scorer = workspace
    out = tmp / "attrs"
    code = main([
        "explain", "--data", str(data), "--scorer", str(scorer),
        "--objective", "kendall", "--estimator", "kernel", "--nsamples", "64",
        "--background", "5", "--seed", "1", "--out", str(out),
    ])
    assert code == 0
    csvs = sorted(out.glob("query_*.csv"))
    assert len(csvs) == 3
    assert (out / "query_q0.json").exists()
    meta = json.loads((out / "query_q0.json").read_text())
    assert meta["seed"] == 1
    assert meta["config"]["seed"] == 1


def test_explain_objective_validation_exit_2(workspace, capsys):
    tmp, data, scorer = workspace
    code = main([
        "explain", "--data", str(data), "--scorer", str(scorer),
        "--objective", "topk:0", "--out", str(tmp / "x"),
    ])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_explain_missing_file_exit_2(workspace):
    tmp, _, scorer = workspace
    code = main([
        "explain", "--data", str(tmp / "nope.txt"), "--scorer", str(scorer),
        "--out", str(tmp / "x"),
    ])
    assert code == 2


def test_objective_topk_parses(workspace):
    tmp, data, scorer = workspace
    code = main([
        "explain", "--data", str(data), "--scorer", str(scorer),
        "--objective", "topk:3", "--estimator", "exact",
        "--background", "4", "--out", str(tmp / "topk"),
    ])
    assert code == 0


def test_ground_truth_default_and_stability(workspace):
    tmp, data, scorer = workspace
    out = tmp / "gt"
    code = main([
        "ground-truth", "--data", str(data), "--scorer", str(scorer),
        "--nsamples", "128", "--runs", "3", "--background", "5",
        "--query", "q1", "--stability", "32,64", "--out", str(out),
    ])
    assert code == 0
    assert (out / "gt_q1.csv").exists()
    assert (out / "gt_q1_run2.csv").exists()
    summary = json.loads((out / "gt_q1_stability.json").read_text())
    assert summary["runs"] == 3
    assert [row["n_samples"] for row in summary["stability"]] == [32, 64]


def test_ground_truth_single_run_exit_2(workspace):
    tmp, data, scorer = workspace
    code = main([
        "ground-truth", "--data", str(data), "--scorer", str(scorer),
        "--runs", "1", "--out", str(tmp / "gt"),
    ])
    assert code == 2


def test_evaluate_methods_report(workspace):
    tmp, data, scorer = workspace
    out = tmp / "report.csv"
    code = main([
        "evaluate", "--data", str(data), "--scorer", str(scorer),
        "--methods", "rankingshap,pointwise,greedy2,random",
        "--estimator", "exact", "--background", "4", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    # greedy2 expands to two variants: 5 rows + header.
    assert len(lines) == 6
    assert out.with_suffix(".jsonl").exists()


def test_evaluate_self_gt_zero_row(workspace):
    tmp, data, scorer = workspace
    out = tmp / "self.csv"
    code = main([
        "evaluate", "--data", str(data), "--scorer", str(scorer),
        "--methods", "gt", "--estimator", "exact", "--background", "4",
        "--out", str(out),
    ])
    assert code == 0
    row = out.read_text().splitlines()[1].split(",")
    assert all(float(v) == 0.0 for v in row[1:])


def test_evaluate_missing_gt_file_exit_2(workspace):
    tmp, _, _ = workspace
    code = main([
        "evaluate", "--gt-file", str(tmp / "missing.csv"), "--out", str(tmp / "r.csv"),
    ])
    assert code == 2


def test_evaluate_gt_file_dimension_mismatch_exit_2(workspace, tmp_path):
    from rankshap import Attribution

    gt = tmp_path / "gt.csv"
    pred = tmp_path / "pred.csv"
    Attribution(values=np.zeros(3), base_value=0.0).save(gt)
    Attribution(values=np.zeros(4), base_value=0.0).save(pred)
    code = main([
        "evaluate", "--gt-file", str(gt), "--pred", str(pred),
        "--out", str(tmp_path / "r.csv"),
    ])
    assert code == 2


def test_evaluate_gt_file_self_evaluation(tmp_path):
    from rankshap import Attribution

    gt = tmp_path / "gt.csv"
    Attribution(values=np.array([0.5, 0.2, 0.1]), base_value=0.0).save(gt)
    out = tmp_path / "r.csv"
    code = main(["evaluate", "--gt-file", str(gt), "--pred", str(gt), "--out", str(out)])
    assert code == 0
    row = out.read_text().splitlines()[1].split(",")
    assert float(row[1]) == 0.0 and float(row[2]) == 0.0


def test_synthetic_reproducible_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        code = main([
            "synthetic", "--variant", "biased",
            "--methods", "rankingshap,greedy2", "--seed", "3", "--out", str(out),
        ])
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    rows = a.read_text().splitlines()
    assert len(rows) == 1 + 5 * 2 * 5


def test_synthetic_unbiased_shape(tmp_path):
    out = tmp_path / "u.csv"
    code = main([
        "synthetic", "--variant", "unbiased", "--methods", "rankingshap",
        "--out", str(out),
    ])
    assert code == 0
    assert len(out.read_text().splitlines()) == 1 + 5 * 1 * 5


def test_synthetic_unknown_variant_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["synthetic", "--variant", "diagonal", "--out", str(tmp_path / "x.csv")])
    assert exc.value.code == 2


def test_threaded_explain_matches_serial(workspace, monkeypatch):
    tmp, data, scorer = workspace
    serial, threaded = tmp / "s", tmp / "t"
    args = [
        "explain", "--data", str(data), "--scorer", str(scorer),
        "--estimator", "exact", "--background", "4", "--seed", "2",
    ]
    main(args + ["--out", str(serial)])
    monkeypatch.setenv("RANKSHAP_THREADS", "4")
    main(args + ["--out", str(threaded)])
    for f in sorted(serial.glob("query_*.csv")):
        assert f.read_bytes() == (threaded / f.name).read_bytes()
