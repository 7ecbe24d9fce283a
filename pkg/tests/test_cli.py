import json
import subprocess
import sys

import pytest

from hsecagg import small_group
from hsecagg.cli import bench_dlog, main

SMALL = ["--group-bits", "64"]


def test_run_verify_ok(capsys):
    code = main(["run", "--clients", "10", "--threshold", "7", "--vector-len", "4", "--verify", *SMALL])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert doc["verify"]["ok"] is True
    assert doc["output"] == doc["verify"]["expected"]


def test_run_writes_out_file(tmp_path, capsys):
    out = tmp_path / "tr.json"
    assert main(["run", "--clients", "4", "--threshold", "3", "--out", str(out), *SMALL]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["abort"] is None


def test_run_inputs_file(tmp_path, capsys):
    path = tmp_path / "in.json"
    path.write_text(json.dumps({"1": [1, 2], "2": [3, 4], "3": [5, 6]}))
    code = main(["run", "--clients", "3", "--threshold", "2", "--vector-len", "2", "--inputs", str(path), *SMALL])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["output"] == [9, 12]


def test_run_inputs_file_missing_client(tmp_path, capsys):
    path = tmp_path / "in.json"
    path.write_text(json.dumps({"1": [1]}))
    assert main(["run", "--clients", "2", "--threshold", "2", "--vector-len", "1", "--inputs", str(path), *SMALL]) == 1
    assert "lacks vectors" in capsys.readouterr().err


def test_threshold_too_low_exits_1(capsys):
    code = main(["run", "--clients", "6", "--threshold", "4", "--mode", "malicious", *SMALL])
    assert code == 1
    assert "t=5" in capsys.readouterr().err


def test_abort_exits_2(capsys):
    assert main(["run", "--clients", "10", "--dropout-rate", "0.9", *SMALL]) == 2
    assert "TooFewShares" in capsys.readouterr().err


def test_bad_dropout_rate_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--dropout-rate", "1.5"])
    assert exc.value.code == 2


def test_step3_needs_malicious(capsys):
    assert main(["run", "--dropout-step", "3", *SMALL]) == 1
    assert "malicious" in capsys.readouterr().err


def test_group_too_small_for_alpha(capsys):
    assert main(["run", "--clients", "10", "--alpha", str(2**40), "--group-bits", "32"]) == 1


def test_seed_env_fallback(monkeypatch, capsys):
    args = ["run", "--clients", "4", "--threshold", "3", *SMALL]
    main([*args, "--seed", "11"])
    explicit = capsys.readouterr().out
    monkeypatch.setenv("HPRG_AGG_SEED", "11")
    main(args)
    assert capsys.readouterr().out == explicit
    monkeypatch.setenv("HPRG_AGG_SEED", "12")
    main(args)
    assert capsys.readouterr().out != explicit
    monkeypatch.setenv("HPRG_AGG_SEED", "abc")
    assert main(args) == 1


def test_sweep_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    args = ["sweep", "--clients", "10", "--threshold", "6", "--vector-len", "4", "--rates", "0,0.2", *SMALL]
    assert main([*args, "--csv", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3 and lines[0].startswith("rate,")
    assert main(args) == 0
    assert capsys.readouterr().out.strip().splitlines() == lines


def test_bench_dlog_rows():
    rows = bench_dlog(small_group(64), [256, 4096], samples=20, seed=1)
    assert [r["bound"] for r in rows] == [256, 4096]
    assert rows[0]["ratio"] is None and rows[1]["ratio"] > 1


def test_bench_dlog_cli(capsys):
    assert main(["bench-dlog", "--bounds", "64,1024", "--samples", "5", "--group-bits", "64"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split() == ["bound", "mean_ops", "mean_ms", "ratio"]
    assert len(out) == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hsecagg", "run", "--clients", "3", "--threshold", "2", "--vector-len", "1", *SMALL],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["abort"] is None
