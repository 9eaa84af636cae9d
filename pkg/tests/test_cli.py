import csv
import io
import json

import pytest

from qtunnel import cli
from qtunnel.marketdata import parse_csv

from test_detector import HARNESS, RATE


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def simulate_args(path, seed=7, breakout=True):
    args = ["simulate", "--seed", seed, "--bars", HARNESS["bars"], "--start", HARNESS["start"],
            "--support", HARNESS["support"], "--resistance", HARNESS["resistance"],
            "--daily-vol", HARNESS["daily_vol"], "--output", path]
    if breakout:
        args += ["--breakout-at", 200, "--vol-damp", 0.25, "--drift", 0.004, "--direction", "up"]
    return args


def test_transmission_zero_width(capsys):
    code, out, err = run(capsys, "transmission", "--rate", 0.05, "--vol", 0.2, "--strike", 2.0)
    assert code == 0
    doc = json.loads(out)
    assert doc["t_closed"] == 1.0
    assert doc["geometry"]["barrier_exists"] is False


def test_transmission_oracle(capsys):
    code, out, _ = run(capsys, "transmission", "--rate", 0.05, "--vol", 0.2, "--strike", 1.0,
                       "--oracle")
    doc = json.loads(out)
    assert code == 0
    assert doc["rel_gap"] <= 1e-6
    assert doc["t_closed"] == pytest.approx(0.2204, abs=1e-4)


def test_transmission_bad_vol(capsys):
    code, out, err = run(capsys, "transmission", "--rate", 0.05, "--vol", 0, "--strike", 1.0)
    assert code == 1
    assert out == ""
    assert "vol" in err


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["transmission", "--rate", "0.05", "--bogus"])
    assert info.value.code == 1


def test_numeric_failure_exit_3(capsys):
    code, out, err = run(capsys, "transmission", "--rate", 0.01, "--vol", 0.6, "--strike", 1e-4,
                         "--oracle", "--tolerance", 1e-10, "--max-evals", 15)
    assert code == 3 and out == ""
    assert "quadrature" in err


def test_eigen_flat_box(capsys):
    code, out, _ = run(capsys, "eigen", "--flat-potential", "--support", 0, "--resistance", 1,
                       "--count", 1, "--grid-points", 5001, "--rate", 0.05, "--vol", 0.2)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,lambda_n"
    assert float(lines[1].split(",")[1]) == pytest.approx(3.50963, rel=1e-3)
    assert lines[-1].startswith("# resonance_gap=")


def test_eigen_ascending_rows(capsys, tmp_path):
    funcs = tmp_path / "psi.csv"
    code, out, _ = run(capsys, "eigen", "--support", 1, "--resistance", 2, "--count", 3,
                       "--grid-points", 401, "--rate", 0.05, "--vol", 0.2,
                       "--eigenfunctions", funcs)
    rows = [l for l in out.splitlines()[1:] if not l.startswith("#")]
    values = [float(r.split(",")[1]) for r in rows]
    assert code == 0 and len(values) == 3
    assert values[0] < values[1] < values[2]
    table = list(csv.reader(funcs.open()))
    assert table[0] == ["s", "psi_1", "psi_2", "psi_3"]
    assert len(table) == 402


@pytest.mark.parametrize("extra", [["--support", -1], ["--support", 1, "--count", 500]])
def test_eigen_usage_errors(capsys, extra):
    base = {"--support": 1, "--resistance": 2, "--count": 3, "--grid-points": 101}
    for flag, value in zip(extra[::2], extra[1::2]):
        base[flag] = value
    argv = ["eigen", "--rate", 0.05, "--vol", 0.2]
    for k, v in base.items():
        argv += [k, v]
    code, out, _ = run(capsys, *argv)
    assert code == 1 and out == ""


def test_potential(capsys):
    code, out, _ = run(capsys, "potential", "--s-min", 1, "--s-max", 2, "--points", 2)
    assert code == 0
    assert out.splitlines() == ["s,v", "1.0,1.0", "2.0,0.25"]
    code, out, _ = run(capsys, "potential", "--s-min", 1, "--s-max", 3, "--points", 5,
                       "--lambda-level", 0.25)
    assert out.splitlines()[-1] == "# lambda=0.25 turning_point=2.0"
    code, _, _ = run(capsys, "potential", "--s-min", 0, "--s-max", 3)
    assert code == 1


def test_simulate_scan_pipeline(capsys, tmp_path):
    path = tmp_path / "brk.csv"
    assert run(capsys, *simulate_args(path))[0] == 0
    series = parse_csv(path.read_bytes())
    assert len(series) == 300
    code, out, _ = run(capsys, "scan", "--input", path, "--rate", RATE)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["events"]) == 1
    assert doc["symbol"] == "brk"


def test_no_breakout_scan_zero_events(capsys, tmp_path):
    path = tmp_path / "flat.csv"
    run(capsys, *simulate_args(path, seed=1, breakout=False))
    closes = parse_csv(path.read_bytes()).closes
    assert closes.min() >= HARNESS["support"] * (1 - 1e-9)
    assert closes.max() <= HARNESS["resistance"] * (1 + 1e-9)
    out_path = tmp_path / "report.json"
    code, out, _ = run(capsys, "scan", "--input", path, "--rate", RATE, "--output", out_path)
    assert code == 0 and out == ""
    assert json.loads(out_path.read_text())["events"] == []


def test_simulate_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, *simulate_args(a))
    run(capsys, *simulate_args(b))
    assert a.read_bytes() == b.read_bytes()


def test_simulate_invalid_config(capsys):
    code, out, _ = run(capsys, "simulate", "--support", 101)
    assert code == 1 and out == ""


@pytest.mark.parametrize("text", [
    "date,open,high,low,volume\n2013-01-02,1,1,1,1\n",
    "date,open,high,low,close,volume\n2013-01-02,1,1,1,x,1\n",
    "date,open,high,low,close,volume\n2013-01-02,1,1,1,1,1\n2013-01-02,1,1,1,1,1\n",
])
def test_scan_malformed_exit_2(capsys, tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    code, out, err = run(capsys, "scan", "--input", path)
    assert code == 2 and out == ""
    assert "line" in err or "column" in err


def test_scan_too_short_exit_2(capsys, tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("date,open,high,low,close,volume\n2013-01-02,1,1,1,1,1\n")
    assert run(capsys, "scan", "--input", path)[0] == 2


def test_scan_missing_file_exit_2(capsys, tmp_path):
    assert run(capsys, "scan", "--input", tmp_path / "nope.csv")[0] == 2


def test_log_level_env(capsys, tmp_path, monkeypatch):
    path = tmp_path / "brk.csv"
    run(capsys, *simulate_args(path))
    monkeypatch.setenv("QTUNNEL_LOG", "info")
    code, out, err = run(capsys, "scan", "--input", path, "--rate", RATE)
    assert code == 0
    assert "tunneling event" in err
    json.loads(out)


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["scan", "--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert "default: 0.95" in out and "default: 60" in out
