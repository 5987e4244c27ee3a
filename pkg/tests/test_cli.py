import csv
import json

import pytest

from schwinger import cli
from schwinger.cli import ConfigError, RunConfig, main

SMALL = ["--lambda", "2", "--max-pairs", "2", "--grid-points", "64"]


def _run(tmp_path, *argv):
    code = main(list(argv) + ["--out", str(tmp_path)])
    return code


def _report(tmp_path, name):
    return json.loads((tmp_path / f"report_{name}.json").read_text())


def test_config_roundtrip_and_validation(tmp_path):
    cfg = RunConfig.from_dict({"lambda": 3, "e": 1.5})
    assert cfg.lam == 3 and cfg.e == 1.5
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"theta": 4.0}).validate()
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"p_window": 2}).validate()
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"bogus": 1})


def test_config_errors_exit_two(tmp_path, capsys):
    assert _run(tmp_path, "verify", "--theta", "4") == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert _run(tmp_path, "verify", "--config", str(bad)) == 2
    assert "configuration error" in capsys.readouterr().err


def test_minimal_config_skips(tmp_path):
    assert _run(tmp_path, "verify", "--lambda", "1", "--max-pairs", "1", "--grid-points", "32") == 0
    rep = _report(tmp_path, "verify")
    assert rep["schema"] == cli.SCHEMA
    assert rep["summary"]["skip"] > 0 and rep["summary"]["fail"] == 0
    skipped = [c for c in rep["checks"] if c["status"] == "skip"]
    assert all("insufficient window" in c["detail"] for c in skipped)


def test_corrupted_sign_fails(tmp_path):
    code = _run(tmp_path, "verify", "--corrupt-sign", *SMALL)
    assert code == 1
    rep = _report(tmp_path, "verify")
    bad = {c["id"] for c in rep["checks"] if c["status"] == "fail"}
    assert "fock.anticommutator" in bad


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run(a, "anomaly") == 0
    assert _run(b, "anomaly") == 0
    assert (a / "report_anomaly.json").read_bytes() == (b / "report_anomaly.json").read_bytes()
    assert _run(a, "anomaly", "--timings") == 0
    assert any(c["runtime"] is not None for c in _report(a, "anomaly")["checks"])


def test_spectrum_and_vacuum_tables(tmp_path):
    assert _run(tmp_path, "spectrum", "--grid-points", "64") == 0
    rows = list(csv.reader(open(tmp_path / "spectrum.csv")))
    assert len(rows) > 1
    assert _run(tmp_path, "vacuum", "--grid-points", "64") == 0
    rows = list(csv.reader(open(tmp_path / "vacuum.csv")))
    assert rows[0][0] == "a" and len(rows) > 64
    rep = _report(tmp_path, "vacuum")
    assert rep["summary"]["fail"] == 0


@pytest.mark.parametrize("axis", ["grid_points", "m_cutoff", "boson_degree"])
def test_scans(tmp_path, axis):
    assert _run(tmp_path, "scan", "--axis", axis, "--grid-points", "64") == 0
    rep = _report(tmp_path, f"scan_{axis}")
    assert rep["command"] == f"scan:{axis}" and rep["summary"]["fail"] == 0


@pytest.mark.slow
def test_default_verify(tmp_path, capsys):
    assert _run(tmp_path, "verify") == 0
    rep = _report(tmp_path, "verify")
    assert rep["summary"]["fail"] == 0 and rep["summary"]["skip"] == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == rep["summary"]["pass"]
