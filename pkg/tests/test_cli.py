import csv
import json
import shutil

import pytest

from vasrsim.cli import main
from vasrsim.config import BUNDLED_CONFIG, DATA_DIR, load_config, parse_run
from vasrsim.engine import ConfigError

EXPECTED = {
    "experiment1": ("aggressive", "fixed"),
    "experiment2": ("sara", "fixed"),
    "experiment3": ("sara", "spr"),
    "experiment4": ("vasr", "spr"),
    "experiment5": ("vasr", "sar"),
    "experiment6": ("vasr", "sarm"),
}


@pytest.fixture(scope="module")
def matrix_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("matrix")
    assert main(["run", str(BUNDLED_CONFIG), "--out", str(out)]) == 0
    return out


def test_bundled_matrix_layout(matrix_out):
    for name, (algo, policy) in EXPECTED.items():
        run = matrix_out / name
        for f in ("segments.csv", "report.json", "bitrate_cdf.csv", "downloadrate_cdf.csv"):
            assert (run / f).is_file()
        report = json.loads((run / "report.json").read_text())
        assert report["config"]["algorithm"] == algo
        assert report["config"]["policy"] == policy
        assert report["truncated"] is False


def test_summary_equals_reports(matrix_out):
    with open(matrix_out / "matrix_summary.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["run"] for r in rows] == list(EXPECTED)
    for row in rows:
        metrics = json.loads((matrix_out / row["run"] / "report.json").read_text())["metrics"]
        for key, value in metrics.items():
            assert float(row[key]) == value, (row["run"], key)


def test_config_echo_round_trips(matrix_out):
    config = load_config(BUNDLED_CONFIG)
    for spec in config.runs:
        echo = json.loads((matrix_out / spec.name / "report.json").read_text())["config"]
        assert parse_run(echo) == spec


def test_parallel_run_is_byte_identical(matrix_out, tmp_path):
    assert main(["run", str(BUNDLED_CONFIG), "--out", str(tmp_path), "--parallel", "3"]) == 0
    for path in sorted(matrix_out.rglob("*")):
        if path.is_file():
            assert (tmp_path / path.relative_to(matrix_out)).read_bytes() == path.read_bytes(), path


def write_config(tmp_path, runs):
    doc = {
        "catalog": str(DATA_DIR / "elephants_dream.catalog.json"),
        "scenario": str(DATA_DIR / "fig6_like.scenario.json"),
        "runs": runs,
    }
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    return p


def test_invalid_thresholds_exit_2(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        [{"name": "bad", "algorithm": "vasr", "algorithm_params": {"b_low_s": 30, "b_high_s": 25}, "policy": "fixed"}],
    )
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "runs[0].algorithm_params" in err and "b_low_s" in err
    assert not (tmp_path / "o").exists()


@pytest.mark.parametrize(
    "run, field",
    [
        ({"name": "x", "algorithm": "bola", "policy": "fixed"}, "runs[0].algorithm"),
        ({"name": "x", "algorithm": "vasr", "policy": "ospf"}, "runs[0].policy_params"),
        ({"name": "x", "algorithm": "vasr"}, "runs[0].policy"),
        ({"name": "x", "algorithm": "vasr", "policy": "fixed", "colour": 1}, "colour"),
        ({"name": "x", "algorithm": "sara", "policy": "fixed", "algorithm_params": {"gamma": 1}}, "gamma"),
    ],
)
def test_config_errors_name_the_field(tmp_path, run, field):
    with pytest.raises(ConfigError, match=field.replace("[", r"\[").replace("]", r"\]")):
        load_config(write_config(tmp_path, [run]))


def test_missing_config_file(tmp_path):
    assert main(["run", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 2


def test_truncated_run_exits_1(tmp_path):
    scen = json.loads((DATA_DIR / "fig6_like.scenario.json").read_text())
    scen["horizon_s"] = 580  # video is 654 s long, buffer capped at 50 s
    for p in scen["paths"]:
        shutil.copy(DATA_DIR / p["trace"], tmp_path / p["trace"])
    (tmp_path / "scen.json").write_text(json.dumps(scen))
    doc = {
        "catalog": str(DATA_DIR / "elephants_dream.catalog.json"),
        "scenario": "scen.json",
        "runs": [{"name": "short", "algorithm": "vasr", "policy": "fixed"}],
    }
    (tmp_path / "cfg.json").write_text(json.dumps(doc))
    assert main(["run", str(tmp_path / "cfg.json"), "--out", str(tmp_path / "o")]) == 1
    report = json.loads((tmp_path / "o" / "short" / "report.json").read_text())
    assert report["truncated"] is True
    with open(tmp_path / "o" / "matrix_summary.csv") as fh:
        assert list(csv.DictReader(fh))[0]["truncated"] == "1"


def test_plot_writes_five_svgs_idempotently(matrix_out, tmp_path):
    out = tmp_path / "plots"
    assert main(["plot", str(matrix_out / "experiment6"), "--out", str(out)]) == 0
    files = sorted(p.name for p in out.iterdir())
    assert files == sorted(["version.svg", "bitrate.svg", "buffer.svg", "bitrate_cdf.svg", "downloadrate_cdf.svg"])
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    assert main(["plot", str(matrix_out / "experiment6"), "--out", str(out)]) == 0
    assert {p.name: p.read_bytes() for p in out.iterdir()} == first
    assert all(b.lstrip().startswith(b"<?xml") for b in first.values())


def test_plot_rejects_empty_segments(matrix_out, tmp_path):
    run = tmp_path / "run"
    shutil.copytree(matrix_out / "experiment1", run)
    (run / "segments.csv").write_text((run / "segments.csv").read_text().splitlines()[0] + "\n")
    out = tmp_path / "plots"
    assert main(["plot", str(run), "--out", str(out)]) == 1
    assert not out.exists() or not any(out.iterdir())


def test_plot_missing_run_dir(tmp_path):
    assert main(["plot", str(tmp_path / "nothing"), "--out", str(tmp_path / "p")]) == 1
