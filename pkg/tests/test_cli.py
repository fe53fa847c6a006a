import csv
import json
import subprocess
import sys

import pytest

from capa_isac.cli import ENV_CONFIG, METRIC_HEADER, main

FAST = ["--samples", "2000", "--set", "quadrature_order=200"]


def header(path):
    with open(path) as fh:
        return tuple(next(csv.reader(fh)))


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))[1:]


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = main([*argv, *FAST, "-o", str(out)])
    return code, out


@pytest.mark.parametrize("argv, head", [
    (["spectrum"], ("n", "lambda_n", "epsilon_n")),
    (["metrics", "--from", "40", "--to", "50", "--step", "10"], METRIC_HEADER),
    (["metrics", "--sweep", "aperture", "--from", "5", "--to", "6", "--no-mc"],
     ("tx_length",) + METRIC_HEADER[1:]),
    (["pareto", "--taus", "5", "--splits", "3"], ("tau", "sr", "cr", "scheme")),
    (["baselines", "--from", "50", "--to", "50"], METRIC_HEADER + ("scheme",)),
    (["gain-dist", "--points", "20", "--bins", "10"], ("x", "pdf", "cdf")),
])
def test_subcommand_outputs(tmp_path, argv, head):
    code, out = run(tmp_path, *argv)
    assert code == 0
    assert header(out) == head
    assert rows(out)
    manifest = json.loads(out.with_suffix(".manifest.json").read_text())
    assert manifest["subcommand"] == argv[0]
    assert manifest["config"]["mc_samples"] == 2000
    assert manifest["seed"] == manifest["config"]["seed"]
    for key in ("argv", "timestamp", "outputs", "version", "git"):
        assert key in manifest


def test_gain_dist_histogram(tmp_path):
    code, out = run(tmp_path, "gain-dist", "--points", "20", "--bins", "10")
    hist = tmp_path / "out_hist.csv"
    assert header(hist) == ("bin_lo", "bin_hi", "density")
    assert len(rows(hist)) == 10


def test_spectrum_rows_decrease(tmp_path):
    code, out = run(tmp_path, "spectrum", "--modes", "30")
    lam = [float(r[1]) for r in rows(out)]
    assert len(lam) == 30
    assert all(a >= b for a, b in zip(lam, lam[1:]))


def test_corrupt_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"tx_length": -1.0}))
    code = main(["spectrum", "--config", str(bad), "-o", str(tmp_path / "x.csv")])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "config" and err["field"] == "tx_length"


def test_unknown_field(tmp_path, capsys):
    code = main(["spectrum", "--set", "nonsense=3", "-o", str(tmp_path / "x.csv")])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["field"] == "nonsense"


def test_unparsable_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["spectrum", "--config", str(bad)]) == 2


def test_usage_errors(capsys):
    assert main(["frobnicate"]) == 2
    assert json.loads(capsys.readouterr().err.strip())["error"] == "usage"
    assert main(["metrics", "--from", "10", "--to", "0"]) == 2
    assert main(["spectrum", "--workers", "0"]) == 2


def test_validate_exit_zero(tmp_path, capsys):
    out = tmp_path / "v.csv"
    code = main(["validate", "--samples", "20000", "--snr", "50", "-o", str(out)])
    text = capsys.readouterr().out
    assert code == 0, text
    assert "checks passed" in text
    assert all(r[1] == "1" for r in rows(out))


def test_replay_bit_exact(tmp_path):
    code, out = run(tmp_path, "pareto", "--taus", "5", "--splits", "3")
    again = tmp_path / "again.csv"
    assert main(["replay", str(out.with_suffix(".manifest.json")), "-o", str(again)]) == 0
    assert out.read_bytes() == again.read_bytes()


def test_replay_uses_snapshot(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tx_length": 0.5}))
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--config", str(cfg), "-o", str(out)]) == 0
    cfg.write_text(json.dumps({"tx_length": 2.0}))
    again = tmp_path / "s2.csv"
    assert main(["replay", str(out.with_suffix(".manifest.json")), "-o", str(again)]) == 0
    assert out.read_bytes() == again.read_bytes()


def test_env_config_and_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tx_length": 0.5, "seed": 7}))
    monkeypatch.setenv(ENV_CONFIG, str(cfg))
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--seed", "9", "-o", str(out)]) == 0
    m = json.loads(out.with_suffix(".manifest.json").read_text())
    assert m["config"]["tx_length"] == 0.5
    assert m["seed"] == 9
    assert main(["spectrum", "--set", "tx_length=0.75", "-o", str(out)]) == 0
    m = json.loads(out.with_suffix(".manifest.json").read_text())
    assert m["config"]["tx_length"] == 0.75


def test_console_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run([sys.executable, "-m", "capa_isac.cli", "spectrum", "-o", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert header(out) == ("n", "lambda_n", "epsilon_n")
