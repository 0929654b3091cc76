"""Command-line surface: run, check, dot, recommend, serve."""
from __future__ import annotations

import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest
import requests
from click.testing import CliRunner

from tsgraph.cli import cli

ROOT = Path(__file__).resolve().parent.parent
GRAPHS = ROOT / "fixtures" / "graphs"
SCENARIOS = ROOT / "fixtures" / "scenarios"


def invoke(*args):
    return CliRunner().invoke(cli, [str(a) for a in args])


# -- run ---------------------------------------------------------------------


def test_run_all_ok_scenario_passes():
    result = invoke("run", GRAPHS / "connectivity_basic.tsg",
                    "--stub-dir", SCENARIOS / "all-ok")
    assert result.exit_code == 0, result.output
    assert "ping-check  pass" in result.output
    assert "OVERALL" in result.output


def test_run_failing_scenario_still_exits_clean():
    result = invoke("run", GRAPHS / "connectivity_full.tsg",
                    "--stub-dir", SCENARIOS / "trace-midpath")
    assert result.exit_code == 0, result.output
    assert "trace-check  fail !" in result.output
    assert "OVERALL      fail" in result.output


def test_run_corrupt_file_exits_1(tmp_path):
    bad = tmp_path / "bad.tsg"
    bad.write_text("p :: Ping(localhost\n")
    result = invoke("run", bad)
    assert result.exit_code == 1


def test_run_dump_unknown_node_exits_2():
    result = invoke("run", GRAPHS / "connectivity_basic.tsg",
                    "--stub-dir", SCENARIOS / "all-ok", "--dump", "nope")
    assert result.exit_code == 2


def test_run_dump_prints_buffer_contents():
    result = invoke("run", GRAPHS / "connectivity_basic.tsg",
                    "--stub-dir", SCENARIOS / "all-ok", "--dump", "ping")
    assert result.exit_code == 0
    assert "== ping:out0 ==" in result.output
    assert "64 bytes from 10.0.2.80" in result.output


def test_run_virtual_clock_schedule(tmp_path):
    doc = tmp_path / "clock.tsg"
    doc.write_text("c :: Clock(5);\nc[0] -> v :: View();\n")
    result = invoke("run", doc, "--virtual-clock", "0,10", "--dump", "c")
    assert result.exit_code == 0
    assert "012" in result.output


def test_run_bad_schedule_is_a_usage_error(tmp_path):
    doc = tmp_path / "clock.tsg"
    doc.write_text("c :: Clock(5);\nc[0] -> v :: View();\n")
    result = invoke("run", doc, "--virtual-clock", "0,x")
    assert result.exit_code == 2


# -- check -------------------------------------------------------------------


def test_check_clean_fixture():
    result = invoke("check", GRAPHS / "topology_watch.tsg")
    assert result.exit_code == 0


def test_check_arity_mismatch_exits_1(tmp_path):
    doc = tmp_path / "bad.tsg"
    doc.write_text(
        "c :: Clock(5);\nd :: Decision(lab);\nc[0, 1] -> [0]d;\nd[2] -> v :: View();\n"
    )
    result = invoke("check", doc)
    assert result.exit_code == 1
    assert "error" in result.output


def test_check_empty_file(tmp_path):
    doc = tmp_path / "empty.tsg"
    doc.write_text("")
    assert invoke("check", doc).exit_code == 0


# -- dot ---------------------------------------------------------------------


def test_dot_nodes_and_config_style():
    result = invoke("dot", GRAPHS / "topology_watch.tsg")
    assert result.exit_code == 0
    assert result.output.count("[label=") == 4
    basic = invoke("dot", GRAPHS / "connectivity_basic.tsg")
    assert "style=dashed" in basic.output


def test_dot_empty_document(tmp_path):
    doc = tmp_path / "empty.tsg"
    doc.write_text("")
    result = invoke("dot", doc)
    assert result.output == "digraph tsg {\n}\n"


# -- recommend ---------------------------------------------------------------


@pytest.fixture
def repo(tmp_path):
    root = tmp_path / "repo"
    root.mkdir()
    (root / "one.tsg").write_text("p :: Ping(h, t);\nc :: Clock(5);\n")
    (root / "two.tsg").write_text("c :: Clock(9);\nf :: Filter(x);\n")
    return root


def test_recommend_prints_ranked_lines(repo, tmp_path):
    current = tmp_path / "current.tsg"
    current.write_text("mine :: Ping(localhost, 10.0.2.80);\n")
    result = invoke("recommend", current, "--repo", repo)
    assert result.exit_code == 0
    assert result.output == "Clock 2\nFilter 1\n"


def test_recommend_k_caps_output(repo, tmp_path):
    current = tmp_path / "current.tsg"
    current.write_text("")
    result = invoke("recommend", current, "--repo", repo, "-k", "1")
    assert result.output == "Clock 2\n"


def test_recommend_empty_repo(tmp_path):
    empty = tmp_path / "repo"
    empty.mkdir()
    current = tmp_path / "current.tsg"
    current.write_text("")
    result = invoke("recommend", current, "--repo", empty)
    assert result.exit_code == 0 and result.output == ""


def test_recommend_k_zero_is_a_usage_error(repo, tmp_path):
    current = tmp_path / "current.tsg"
    current.write_text("")
    assert invoke("recommend", current, "--repo", repo, "-k", "0").exit_code == 2


# -- serve -------------------------------------------------------------------


def serve_process(*extra):
    return subprocess.Popen(
        [sys.executable, "-m", "tsgraph.cli", "serve",
         str(GRAPHS / "connectivity_basic.tsg"),
         "--stub-dir", str(SCENARIOS / "all-ok"), *extra],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
    )


def wait_for_listen_line(proc, timeout=15):
    deadline = time.time() + timeout
    while time.time() < deadline:
        line = proc.stdout.readline()
        if line.startswith("listening on "):
            return line.split("listening on ", 1)[1].strip()
        if proc.poll() is not None:
            break
    raise AssertionError(f"no listen line; stderr: {proc.stderr.read()}")


def test_serve_answers_topology_and_stops_on_sigterm():
    proc = serve_process("--listen", "127.0.0.1:0")
    try:
        base = wait_for_listen_line(proc)
        body = requests.get(f"{base}/api/v1/topology", timeout=5).json()
        assert {n["id"] for n in body["nodes"]} >= {"ping", "ping-decision", "ds"}

        events = requests.get(
            f"{base}/api/v1/events", params={"live": "false"}, timeout=5
        )
        assert events.status_code == 200
        assert "node-executed" in events.text
    finally:
        proc.send_signal(signal.SIGTERM)
        assert proc.wait(timeout=15) == 0


def test_serve_bad_listen_address_exits_2():
    proc = serve_process("--listen", "nonsense")
    assert proc.wait(timeout=15) == 2


def test_serve_busy_port_exits_2():
    with socket.create_server(("127.0.0.1", 0)) as sock:
        port = sock.getsockname()[1]
        proc = serve_process("--listen", f"127.0.0.1:{port}")
        assert proc.wait(timeout=15) == 2
