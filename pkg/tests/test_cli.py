# -*- coding: utf-8 -*-
import json

import pytest

import main
from agents.verify_suite import run_verify

GRID = ["--r0", "0.5", "--scales", "2", "--tail", "3", "--stride", "100"]


@pytest.fixture
def circle_json(tmp_path):
    path = tmp_path / "circle.json"
    assert main.main(["generate", "--kind", "circle", "--count", "400", "--seed", "1", "--out", str(path)]) == 0
    return path


def test_generate_writes_cloud(circle_json):
    data = json.loads(circle_json.read_text())
    assert len(data["points"]) == 400
    assert data["k"] == 1


def test_generate_params_and_csv(tmp_path):
    path = tmp_path / "g.csv"
    argv = ["generate", "--kind", "c1alpha_graph", "--count", "50", "--param", "alpha=0.5", "--out", str(path)]
    assert main.main(argv) == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "x1,x2,w"
    assert len(lines) == 51


def test_classify_circle(circle_json, tmp_path):
    out = tmp_path / "report.json"
    assert main.main(["classify", "--input", str(circle_json), "--out", str(out)] + GRID) == 0
    report = json.loads(out.read_text())
    assert report["aggregate"]["queries"] == 4
    assert report["aggregate"]["criteria"]["fixed_paraboloid"]["pass_fraction"] == 1.0
    assert all("profile" not in p for p in report["per_point"])


def test_classify_to_stdout(circle_json, capsys):
    assert main.main(["classify", "--input", str(circle_json), "--p", "1", "--p", "inf"] + GRID) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["params"]["p_list"] == ["1", "inf"]


def test_analyze_then_report(circle_json, tmp_path, capsys):
    out = tmp_path / "analysis.json"
    assert main.main(["analyze", "--input", str(circle_json), "--out", str(out)] + GRID) == 0
    assert json.loads(out.read_text())["cloud"]["n_points"] == 400
    plots = tmp_path / "plots"
    assert main.main(["report", "--input", str(out), "--out", str(plots), "--prefix", "c"]) == 0
    written = capsys.readouterr().out.split()
    assert len(written) == 10
    assert (plots / "c_theta.tsv").exists()


def test_report_needs_profiles(circle_json, tmp_path):
    out = tmp_path / "report.json"
    assert main.main(["classify", "--input", str(circle_json), "--out", str(out)] + GRID) == 0
    assert main.main(["report", "--input", str(out), "--out", str(tmp_path / "plots")]) == 2


def test_missing_input_is_parse_error(tmp_path):
    assert main.main(["classify", "--input", str(tmp_path / "none.csv"), "--k", "1"]) == 1


def test_invalid_alpha(circle_json):
    assert main.main(["classify", "--input", str(circle_json), "--alpha", "1.5"] + GRID) == 2


def test_same_input_and_output(circle_json):
    assert main.main(["classify", "--input", str(circle_json), "--out", str(circle_json)]) == 2


def test_all_indeterminate_exit_code(circle_json):
    argv = ["classify", "--input", str(circle_json), "--r0", "0.01", "--scales", "2", "--tail", "3", "--stride", "100"]
    assert main.main(argv) == 3


def test_bad_p_is_rejected_by_argparse(circle_json):
    with pytest.raises(SystemExit):
        main.main(["classify", "--input", str(circle_json), "--p", "0.5"])


def test_verify_exit_codes(monkeypatch, tmp_path):
    def quick(seed, sabotage=None):
        return run_verify(seed=seed, sabotage=sabotage, only=["elem", "tube"])

    monkeypatch.setattr(main, "run_verify", quick)
    ok = tmp_path / "ok.json"
    assert main.main(["verify", "--seed", "3", "--out", str(ok)]) == 0
    assert json.loads(ok.read_text())["passed"] is True
    bad = tmp_path / "bad.json"
    assert main.main(["verify", "--seed", "3", "--sabotage", "elem", "--out", str(bad)]) == 4
    assert json.loads(bad.read_text())["first_failure"] == "elem"


def test_unknown_sabotage_target():
    assert main.main(["verify", "--sabotage", "nope"]) == 2


def test_schema_to_stdout(capsys):
    assert main.main(["schema", "--report-kind", "verify"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert "lemmas" in schema["properties"]


def test_report_on_missing_file(tmp_path):
    assert main.main(["report", "--input", str(tmp_path / "gone.json"), "--out", str(tmp_path)]) == 1
