import io
import json
from pathlib import Path

import numpy as np
import pandas
import pytest
from click.testing import CliRunner

from eivslope.cli import cli

DATA = Path(__file__).parent / "data"


@pytest.fixture
def zellner_csv(zellner_data, tmp_path) -> Path:
    path = tmp_path / "zellner.csv"
    np.savetxt(
        path,
        np.column_stack([zellner_data.y1, zellner_data.y2]),
        delimiter=",",
        fmt="%.17g",
        header="y1,y2",
        comments="",
    )
    return path


def invoke(*args: str):
    return CliRunner().invoke(cli, [str(arg) for arg in args])


def test_fit(zellner_csv):
    result = invoke("fit", "--input", zellner_csv)
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["n"] == 20
    assert report["nu"] == 19
    assert report["r"] == pytest.approx(0.909, abs=1e-9)
    assert report["l"] == pytest.approx(0.963, abs=1e-9)
    assert report["median"] == pytest.approx(0.963, abs=0.002)
    assert report["interval"]["lower"] == pytest.approx(0.722, abs=0.005)
    assert report["interval"]["upper"] == pytest.approx(1.237, abs=0.005)
    assert report["interval"]["level"] == 0.95
    assert report["intercept_plugin"] == pytest.approx(9.5 - report["median"] * 10.0)
    direct, inverted = report["ols_intervals"]
    assert direct["regression"] == "y2_on_y1"
    assert (direct["lower"], direct["upper"]) == pytest.approx((0.676, 1.075), abs=2e-3)
    assert (inverted["lower"], inverted["upper"]) == pytest.approx((0.864, 1.372), abs=2e-3)


def test_fit_is_reproducible(zellner_csv):
    first = invoke("fit", "--input", zellner_csv, "--level", "0.9")
    again = invoke("fit", "--input", zellner_csv, "--level", "0.9")
    assert first.exit_code == again.exit_code == 0
    assert first.stdout == again.stdout


def test_fit_output_file(zellner_csv, tmp_path):
    output = tmp_path / "fit.json"
    result = invoke("fit", "--input", zellner_csv, "--output", output)
    assert result.exit_code == 0
    assert json.loads(output.read_text())["n"] == 20

    # existing files are left alone
    result = invoke("fit", "--input", zellner_csv, "--output", output)
    assert result.exit_code == 2
    assert json.loads(result.stdout)["error"] == "FileExistsError"


def test_density(tmp_path):
    result = invoke("density", "--input", DATA / "pairs.csv", "--grid", "3")
    assert result.exit_code == 0, result.output
    lines = result.stdout.strip().splitlines()
    assert lines[0] == "beta,theta,density,theta_density,cdf"
    assert len(lines) == 4

    result = invoke("density", "--input", DATA / "pairs.csv", "--grid", "5", "--format", "json")
    report = json.loads(result.stdout)
    assert len(report["rows"]) == 5
    assert report["nu"] == 7
    assert 0 < report["r"] < 1


def test_estimators():
    args = ("estimators", "--input", DATA / "pairs.csv", "--seed", "4", "--boot-reps", "200")
    first, again = invoke(*args), invoke(*args)
    assert first.exit_code == 0, first.output
    assert first.stdout == again.stdout
    report = json.loads(first.stdout)
    assert report["estimates"]["b1"] > 0
    assert [ci["estimator"] for ci in report["bootstrap"]] == [
        "ols",
        "geometric_mean",
        "ols_bisector",
        "orthogonal",
    ]
    for ci in report["bootstrap"]:
        assert ci["lower"] < ci["upper"]
        assert ci["replicates"] == 200
        assert ci["level"] == 0.95

    csv = invoke(*args, "--format", "csv")
    table = pandas.read_csv(io.StringIO(csv.stdout))
    assert list(table.columns[:4]) == ["estimator", "estimate", "lower", "upper"]
    assert list(table["estimator"]) == [
        "ols",
        "b2",
        "geometric_mean",
        "ols_bisector",
        "orthogonal",
    ]
    estimates = table.set_index("estimator")["estimate"]
    assert estimates["b2"] == pytest.approx(report["estimates"]["b2"], rel=1e-9)
    assert estimates["ols"] == pytest.approx(report["estimates"]["b1"], rel=1e-9)
    assert table.set_index("estimator").loc["b2", ["lower", "upper"]].isna().all()
    assert table.set_index("estimator").loc["orthogonal", "upper"] == pytest.approx(
        report["bootstrap"][3]["upper"], rel=1e-9
    )


def test_agreement():
    result = invoke("agreement", "--input", DATA / "pairs.csv")
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["stats"]["n"] == 8
    assert report["stats"]["loa_lower"] < report["stats"]["mean_diff"] < report["stats"]["loa_upper"]
    assert len(report["points"]) == 8
    assert report["points"][0] == {
        "index": 0,
        "y1": 4.1,
        "y2": 4.0,
        "mean": 4.05,
        "difference": -0.1,
    }

    csv = invoke("agreement", "--input", DATA / "pairs.csv", "--format", "csv")
    table = pandas.read_csv(io.StringIO(csv.stdout))
    assert list(table.columns) == [
        "index",
        "y1",
        "y2",
        "mean",
        "difference",
        "mean_diff",
        "sd_diff",
        "loa_lower",
        "loa_upper",
        "cov_diff_mean",
    ]
    assert len(table) == 8
    for name in ("mean_diff", "sd_diff", "loa_lower", "loa_upper", "cov_diff_mean"):
        assert table[name].nunique() == 1
        assert table[name].iloc[0] == pytest.approx(report["stats"][name], rel=1e-9, abs=1e-12)


@pytest.mark.parametrize(
    "content,error",
    [
        ("1,2\n3,4\n5,x\n", "ParseError"),
        ("1,2,3\n4,5,6\n7,8,9\n", "ParseError"),
        ("1,2\n3,4\n", "TooFewPoints"),
    ],
)
def test_bad_input(tmp_path, content, error):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    result = invoke("fit", "--input", path)
    assert result.exit_code == 2
    report = json.loads(result.stdout)
    assert report["error"] == error
    assert report["exit_code"] == 2


def test_parse_error_names_the_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y1,y2\n1,2\n\n3,4\n5,x\n")
    report = json.loads(invoke("fit", "--input", path).stdout)
    assert report["message"].startswith("line 5:")


def test_undecodable_input(tmp_path):
    path = tmp_path / "latin1.csv"
    path.write_bytes(b"1,2\n3,4\n\xff\xfe5,6\n")
    result = invoke("fit", "--input", path)
    assert result.exit_code == 2
    report = json.loads(result.stdout)
    assert report["error"] == "ParseError"
    assert report["message"].startswith("line 3:")


def test_missing_input(tmp_path):
    result = invoke("fit", "--input", tmp_path / "missing.csv")
    assert result.exit_code == 2
    assert json.loads(result.stdout)["error"] == "FileNotFoundError"


def test_numerical_failure_exit_code(tmp_path):
    # collinear points
    path = tmp_path / "line.csv"
    path.write_text("1,2\n2,4\n3,6\n4,8\n")
    result = invoke("fit", "--input", path)
    assert result.exit_code == 3
    assert json.loads(result.stdout)["error"] == "PerfectCorrelation"


def test_simulate_from_yaml(tmp_path):
    output = tmp_path / "coverage.csv"
    result = invoke(
        "simulate", "--config", DATA / "simulation.yaml", "--output", output
    )
    assert result.exit_code == 0
    lines = output.read_text().strip().splitlines()
    assert lines[0].startswith("n,sigma1,sigma2,posterior_coverage")
    assert lines[1].startswith("10,0.3,0.3,")


def test_simulate_rejects_small_runs():
    result = invoke("simulate", "--replicates", "10")
    assert result.exit_code == 2
    assert json.loads(result.stdout)["error"] == "ValidationError"
