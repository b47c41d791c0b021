import json
import subprocess
import sys

import pytest

from artifact.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def test_embed_find_reports_not_found(tmp_path, capsys):
    rep = tmp_path / "r.json"
    assert run("embed", "find", "--src", "chain-5", "--dst", "chain-3", "--report", rep) == 0
    assert json.loads(rep.read_text())["result"]["result"] == "not-found"


def test_embed_find_writes_witness(tmp_path):
    out = tmp_path / "w.txt"
    assert run("embed", "find", "--src", "chain-2", "--dst", "chain-4", "--out", out) == 0
    assert out.read_text().strip()


def test_build_staircase_passes(tmp_path):
    out = tmp_path / "t.treev1"
    assert run("build", "staircase", "--horizon", 200, "--out", out) == 0
    assert out.read_text().startswith("# stage 0")


def test_missing_file_is_usage_error(capsys):
    assert run("verify", "cac", "--trace", "/nonexistent/trace.jsonl") == 2
    assert "cannot read" in capsys.readouterr().err


def test_garbage_trace_is_usage_error(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    assert run("verify", "cac", "--trace", bad) == 2


def test_bad_subcommand_is_usage_error():
    assert run("build", "nothing") == 2


def test_bad_config_is_usage_error(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("pair <0,0> tree=nope map=shift\n")
    assert run("adversary", "isomaxinf", "--config", cfg, "--horizon", 10) == 2


def test_fault_trace_fails_verification(tmp_path):
    log = tmp_path / "cac.jsonl"
    assert run("adversary", "cac", "--horizon", 300, "--inject-fault", "--log", log) == 1
    assert run("verify", "cac", "--trace", log) == 1
    clean = tmp_path / "clean.jsonl"
    assert run("adversary", "cac", "--horizon", 300, "--log", clean) == 0
    assert run("verify", "cac", "--trace", clean) == 0


def test_wrong_trace_kind_is_usage_error(tmp_path):
    log = tmp_path / "cac.jsonl"
    run("adversary", "cac", "--horizon", 30, "--log", log)
    assert run("verify", "isomaxinf", "--trace", log) == 2


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run("adversary", "isomaxinf", "--horizon", 60, "--report", p) == 0
    assert a.read_bytes() == b.read_bytes()


def test_report_merge(tmp_path):
    good, bad = tmp_path / "good.json", tmp_path / "bad.json"
    run("adversary", "cac", "--horizon", 300, "--report", good)
    run("adversary", "cac", "--horizon", 300, "--inject-fault", "--report", bad)
    assert run("report", good) == 0
    assert run("report", good, bad) == 1
    junk = tmp_path / "junk.json"
    junk.write_text("[]")
    assert run("report", junk) == 2


@pytest.mark.parametrize("argv", [
    ["embed", "kruskal", "--fixture", "chains", "--window", "20"],
    ["analyze", "cac", "--tree", "leafy"],
    ["analyze", "cac", "--tree", "leafless"],
])
def test_commands_pass(argv):
    assert main(argv) == 0


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "artifact.cli", "embed", "find",
                           "--src", "chain-2", "--dst", "chain-3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
