import json

import pandas as pd
import pytest

from eframe_core.cli import main, run_analyze, run_verify

DIAGONAL = {
    "dim": 2,
    "len": 2,
    "trials": 3,
    "seed": 1,
    "matrix": {"kind": "diagonal", "entries": [[2, 0], [3, 0]]},
    "frame": {"kind": "standard"},
    "theorems": ["thm3"],
}


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def without_wall_time(path):
    body = read_json(path)
    body["summary"].pop("wall_time_ms")
    return body


def test_analyze_diagonal(tmp_path, write_config, run_log):
    out = tmp_path / "analyze.json"
    assert main(["analyze", "--config", str(write_config(DIAGONAL)), "--out", str(out)]) == 0
    body = read_json(out)
    assert body["command"] == "analyze"
    assert len(body["reports"]) == 3
    for r in body["reports"]:
        assert r["verifier"] == "optimal"
        assert (r["optimal"]["lower"], r["optimal"]["upper"]) == pytest.approx((4, 9))
    assert body["summary"]["counts"] == {"pass": 3, "fail": 0, "skip": 0}
    log = pd.read_csv(run_log)
    assert list(log["command"]) == ["analyze"]
    assert log.loc[0, "n_pass"] == 3


def test_zero_trials_is_a_usage_error(tmp_path, write_config):
    cfg = write_config({**DIAGONAL, "trials": 0})
    out = tmp_path / "out.json"
    assert main(["analyze", "--config", str(cfg), "--out", str(out)]) == 2
    assert not out.exists()


def test_missing_config_is_a_usage_error(tmp_path):
    assert main(["analyze", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o.json")]) == 2


def test_argparse_errors_exit_2(tmp_path):
    assert main(["verify", "--config", "x.json"]) == 2
    assert main(["explode"]) == 2
    assert main(["--seed", "-3", "gen", "--spec", "s.yaml", "--out", "o.json"]) == 2


def test_unknown_verifier(tmp_path, write_config):
    cfg = write_config(DIAGONAL)
    code = main(["verify", "--theorems", "thm3,bogus", "--config", str(cfg), "--out", str(tmp_path / "o.json")])
    assert code == 2


def test_verify_csv_and_determinism(tmp_path, write_config):
    cfg = write_config({**DIAGONAL, "frame": {"kind": "random"}, "trials": 5})
    runs = []
    for i in range(2):
        out, csv = tmp_path / f"r{i}.json", tmp_path / f"r{i}.csv"
        argv = ["verify", "--theorems", "thm3,diag,ab,dual", "--config", str(cfg), "--out", str(out), "--csv", str(csv)]
        assert main(argv) == 0
        runs.append((out, csv))
    (j0, c0), (j1, c1) = runs
    assert without_wall_time(j0) == without_wall_time(j1)
    assert c0.read_bytes() == c1.read_bytes()
    header = c0.read_text(encoding="utf-8").splitlines()[0]
    assert header == "trial,verifier,A_pred,B_pred,A_opt,B_opt,residual,status"
    assert len(pd.read_csv(c0)) == 5 * 4


def test_verify_uses_config_theorems(tmp_path, write_config):
    out = tmp_path / "o.json"
    assert main(["verify", "--config", str(write_config(DIAGONAL)), "--out", str(out)]) == 0
    assert {r["verifier"] for r in read_json(out)["reports"]} == {"thm3"}


def test_global_overrides(tmp_path, write_config):
    cfg = str(write_config({**DIAGONAL, "frame": {"kind": "random"}}))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--seed", "42", "verify", "--config", cfg, "--out", str(a)]) == 0
    assert main(["verify", "--seed", "42", "--tol", "1e-7", "--config", cfg, "--out", str(b)]) == 0
    assert read_json(a)["config"]["seed"] == 42
    assert read_json(b)["config"]["tolerances"]["rel_tol"] == 1e-7
    digests = lambda p: [r["inputs_digest"] for r in read_json(p)["reports"]]
    assert digests(a) == digests(b)
    assert main(["--tol", "5", "verify", "--config", cfg, "--out", str(a)]) == 2


def test_verify_fixture(tmp_path, data_dir):
    out = tmp_path / "fixture.json"
    cfg = str(data_dir / "configs" / "upper_triangular_fixture.json")
    assert main(["verify", "--theorems", "ab,decomp", "--config", cfg, "--out", str(out)]) == 0
    ab, decomp = read_json(out)["reports"]
    assert ab["status"] == "skip"
    assert ab["skip_reason"].startswith("a<=0")
    assert decomp["status"] == "pass"
    assert max(decomp["residuals"].values()) <= 1e-8


def test_failures_exit_1(tmp_path, write_config):
    # frame {e1, e1} is not a frame for C^2: the analyze report fails its frame_lower check
    cfg = write_config({**DIAGONAL, "frame": {"kind": "explicit", "vectors": [[1, 0], [1, 0]]}, "trials": 1})
    out = tmp_path / "o.json"
    assert main(["analyze", "--config", str(cfg), "--out", str(out)]) == 1
    (report,) = read_json(out)["reports"]
    assert report["status"] == "fail"
    assert "frame_lower" in report["failed"]


def test_gen(tmp_path, data_dir):
    out = tmp_path / "gram.json"
    assert main(["gen", "--spec", str(data_dir / "specs" / "gram.yaml"), "--out", str(out)]) == 0
    body = read_json(out)
    assert body["kind"] == "gram" and body["n"] == 2
    assert body["entries"] == [[[1.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [2.0, 0.0]]]
    assert body["invertible"] is True

    a, b = tmp_path / "a.json", tmp_path / "b.json"
    spec = str(data_dir / "specs" / "randomhs.yaml")
    assert main(["gen", "--spec", spec, "--out", str(a)]) == 0
    assert main(["gen", "--spec", spec, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_bad_spec(tmp_path):
    spec = tmp_path / "bad.yaml"
    spec.write_text("n: 3\nmatrix:\n  kind: diagonal\n  entries: [1, 2]\n")
    assert main(["gen", "--spec", str(spec), "--out", str(tmp_path / "o.json")]) == 2


def test_run_functions_return_exit_codes(tmp_path, write_config):
    cfg = write_config(DIAGONAL)
    assert run_analyze(cfg, tmp_path / "a.json") == 0
    assert run_verify(["thm3", "diag"], cfg, tmp_path / "v.json", csv_path=tmp_path / "v.csv") == 0
    assert (tmp_path / "v.csv").exists()
    assert run_verify(["nope"], cfg, tmp_path / "x.json") == 2


@pytest.mark.parametrize("changes", [
    {"matrix": {"kind": "dense", "entries": [[float("nan"), 0], [0, 1]]}},
    {"tolerances": {"rel_tol": 1e-9, "rank_tol": float("inf"), "orthonorm_tol": 1e-8}},
])
def test_non_finite_config_is_a_usage_error(tmp_path, write_config, changes):
    out = tmp_path / "o.json"
    assert main(["verify", "--config", str(write_config({**DIAGONAL, **changes})), "--out", str(out)]) == 2
    assert not out.exists()


def test_gen_rejects_tol(tmp_path, data_dir):
    out = tmp_path / "o.json"
    spec = str(data_dir / "specs" / "gram.yaml")
    assert main(["--tol", "1e-6", "gen", "--spec", spec, "--out", str(out)]) == 2
    assert main(["gen", "--tol", "1e-6", "--spec", spec, "--out", str(out)]) == 2
    assert not out.exists()
