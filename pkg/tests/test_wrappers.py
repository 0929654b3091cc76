"""Wrapper node behavior, driven through stub transcripts.

The scenario directories under fixtures/scenarios each hold the tool
transcripts for one state of the example network; running the full
triage graph against them must light up exactly the right nodes.
"""
from __future__ import annotations

import ipaddress
import re
from pathlib import Path

import pytest

from tsgraph.engine import EventKind, start_engine
from tsgraph.graph import build_graph
from tsgraph.lang import parse_document
from tsgraph.nodes import build_default_registry
from tsgraph.nodes.proc import ToolError
from tsgraph.nodes.wrappers import trace_status

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FULL_GRAPH = (FIXTURES / "graphs" / "connectivity_full.tsg").read_text()


def build(text):
    return build_graph(parse_document(text), build_default_registry())


def run_scenario(name):
    tsg = build(FULL_GRAPH)
    engine = start_engine(tsg, stub_dir=str(FIXTURES / "scenarios" / name))
    return engine


def executed_nodes(engine):
    return {e.node_id for e in engine.events if e.kind is EventKind.NODE_EXECUTED}


def parse_summary(text):
    rows = {}
    for line in text.splitlines()[1:]:
        parts = re.split(r"\s{2,}", line)
        rows[parts[0]] = parts[1]
    return rows


def latest(engine, buffer_id):
    record = engine.buffers[buffer_id].latest()
    return record.text if record else None


ALL_NODES = {
    "ping", "ifconfig", "host", "arp", "trace", "route", "ipt",
    "dec1", "dec2", "dec3", "dec4", "dec5", "dec6",
    "function1", "function2", "summary",
}

SCENARIOS = {
    "all-ok": (
        {"ping", "dec1", "summary"},
        {
            "ping-check": "pass",
            "input 1": "pending", "input 2": "pending", "input 3": "pending",
            "input 4": "pending", "input 5": "pending",
            "OVERALL": "pass",
        },
    ),
    "ifc-bad": (
        {"ping", "dec1", "ifconfig", "dec2", "summary"},
        {
            "ping-check": "fail !", "ifc-check": "fail !",
            "input 2": "pending", "input 3": "pending",
            "input 4": "pending", "input 5": "pending",
            "OVERALL": "fail",
        },
    ),
    "arp-empty": (
        {"ping", "dec1", "ifconfig", "dec2", "function1", "host", "dec3",
         "arp", "dec4", "summary"},
        {
            "ping-check": "fail !", "ifc-check": "pass", "host-check": "pass",
            "arp-check": "fail !",
            "input 4": "pending", "input 5": "pending",
            "OVERALL": "fail",
        },
    ),
    "trace-midpath": (
        ALL_NODES,
        {
            "ping-check": "fail !", "ifc-check": "pass", "host-check": "pass",
            "arp-check": "pass", "trace-check": "fail !", "route-check": "fail !",
            "OVERALL": "fail",
        },
    ),
}


def test_full_graph_builds():
    tsg = build(FULL_GRAPH)
    assert set(tsg.nodes) == ALL_NODES
    assert tsg.nodes["summary"].class_name == "Decision-summary"


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_execution_set(name):
    engine = run_scenario(name)
    expected_nodes, _ = SCENARIOS[name]
    assert executed_nodes(engine) == expected_nodes
    assert not [e for e in engine.events if e.kind is EventKind.NODE_ERROR]


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_summary_rows(name):
    engine = run_scenario(name)
    _, expected_rows = SCENARIOS[name]
    assert parse_summary(latest(engine, "summary:out0")) == expected_rows


def test_stub_relay_reproduces_tool_bytes():
    engine = run_scenario("all-ok")
    text = "".join(r.text for r in engine.buffers["ping:out0"].records)
    assert text == (FIXTURES / "scenarios" / "all-ok" / "Ping.ok.txt").read_text()


def test_midpath_trace_status_record():
    engine = run_scenario("trace-midpath")
    raw = "".join(r.text for r in engine.buffers["trace:out0"].records)
    assert raw == (FIXTURES / "scenarios" / "trace-midpath" / "Traceroute.midpath.txt").read_text()
    assert [r.text for r in engine.buffers["trace:out1"].records] == ["LastHop 10.0.1.254\n"]


def test_route_filter_leaves_only_the_pulse():
    engine = run_scenario("trace-midpath")
    assert [r.text for r in engine.buffers["route:out0"].records] == [""]


def test_firewall_dump_names_the_drop_rule():
    engine = run_scenario("trace-midpath")
    text = "".join(r.text for r in engine.buffers["ipt:out0"].records)
    assert "DROP" in text and "10.0.2.80" in text
    assert "Chain FORWARD" not in text


# -- traceroute status extraction --------------------------------------------


def status_oracle(text, target):
    """Independent verdict: token-scan hop lines for addresses."""
    hops = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts or not parts[0].isdigit():
            continue
        addr = None
        for token in parts[1:]:
            token = token.strip("()")
            try:
                ipaddress.ip_address(token)
            except ValueError:
                continue
            addr = token
            break
        hops[int(parts[0])] = (addr, target in line)
    if not hops:
        return "LastHop none"
    deepest = max(hops)
    answered = [(n, addr) for n, (addr, _) in sorted(hops.items()) if addr]
    if not answered:
        return "LastHop none"
    if answered[-1][0] == deepest and hops[deepest][1]:
        return f"Success {target}"
    return f"LastHop {answered[-1][1]}"


SUCCESS_TRACE = """\
traceroute to 10.0.2.80 (10.0.2.80), 30 hops max, 60 byte packets
 1  10.0.0.1 (10.0.0.1)  0.512 ms  0.498 ms  0.491 ms
 2  server.example.com (10.0.2.80)  1.203 ms  1.187 ms  1.164 ms
"""

ALL_STARS_TRACE = """\
traceroute to 10.0.2.80 (10.0.2.80), 30 hops max, 60 byte packets
 1  * * *
 2  * * *
"""

LATE_ANSWER_TRACE = """\
traceroute to 10.0.2.80 (10.0.2.80), 30 hops max, 60 byte packets
 1  10.0.0.1 (10.0.0.1)  0.5 ms
 2  * * *
 3  10.0.2.80 (10.0.2.80)  2.0 ms
"""


def run_status(text, target="10.0.2.80"):
    tsg = build(f"tr :: Traceroute(localhost, {target});")
    from tsgraph.engine import Engine

    engine = Engine(tsg)
    trace_status(engine.context_for("tr"), text)
    return [r.text for r in engine.buffers["tr:out1"].records]


MIDPATH = (FIXTURES / "scenarios" / "trace-midpath" / "Traceroute.midpath.txt").read_text()


@pytest.mark.parametrize("text,expected", [
    (MIDPATH, "LastHop 10.0.1.254\n"),
    (SUCCESS_TRACE, "Success 10.0.2.80\n"),
    (ALL_STARS_TRACE, "LastHop none\n"),
    (LATE_ANSWER_TRACE, "Success 10.0.2.80\n"),
    ("", "LastHop none\n"),
])
def test_trace_status_cases(text, expected):
    assert run_status(text) == [expected]
    assert expected == status_oracle(text, "10.0.2.80") + "\n"


def test_trace_status_matches_named_target():
    # The target config may be a hostname; the final hop line names it.
    assert run_status(SUCCESS_TRACE, target="server.example.com") == [
        "Success server.example.com\n"
    ]


def test_trace_status_unparseable_output():
    tsg = build("tr :: Traceroute(localhost, 10.0.2.80);")
    from tsgraph.engine import Engine

    engine = Engine(tsg)
    with pytest.raises(ToolError, match="unparseable trace output"):
        trace_status(engine.context_for("tr"), "complete garbage\nno hops at all\n")
    assert [r.text for r in engine.buffers["tr:out1"].records] == ["LastHop none\n"]


# -- clock -------------------------------------------------------------------


def test_clock_is_silent_until_time_moves():
    engine = start_engine(build("c :: Clock(5);"))
    assert len(engine.buffers["c:out0"]) == 0


def test_clock_ticks_inclusive_of_start():
    engine = start_engine(build("c :: Clock(5);"))
    engine.advance_to(12)
    assert [r.text for r in engine.buffers["c:out0"].records] == ["0", "1", "2"]
    engine.advance_to(12)
    assert len(engine.buffers["c:out0"]) == 3
    engine.advance_to(15)
    assert engine.buffers["c:out0"].latest().text == "3"


def test_clock_fractional_period():
    engine = start_engine(build("c :: Clock(0.5);"))
    engine.advance_to(1.1)
    assert [r.text for r in engine.buffers["c:out0"].records] == ["0", "1", "2"]


@pytest.mark.parametrize("period", ["0", "-3", "abc"])
def test_clock_rejects_bad_period(period):
    engine = start_engine(build(f"c :: Clock({period});"))
    errors = [e for e in engine.events if e.kind is EventKind.NODE_ERROR]
    assert len(errors) == 1
    assert "period must be a positive number of seconds" in errors[0].detail
    assert len(engine.buffers["c:out0"]) == 0


# -- interface exclusion and shell wrapper -----------------------------------


def test_ifconfig_exclude_drops_the_section():
    from tsgraph.functions import ifconfig_sections

    tsg = build("ifc :: Ifconfig(localhost, lo);")
    engine = start_engine(tsg, stub_dir=str(FIXTURES / "scenarios" / "arp-empty"))
    text = "".join(r.text for r in engine.buffers["ifc:out0"].records)
    assert [name for name, _ in ifconfig_sections(text)] == ["eth0"]


def test_command_runs_a_shell_line():
    engine = start_engine(build("cmd :: Command(localhost, echo, hello-from-command);"))
    assert [r.text for r in engine.buffers["cmd:out0"].records] == [
        "hello-from-command\n", "",
    ]


def test_command_skips_nil_configs():
    engine = start_engine(build("cmd :: Command(localhost, echo, nil, again);"))
    assert latest(engine, "cmd:out0") == ""
    assert "".join(r.text for r in engine.buffers["cmd:out0"].records) == "again\n"


def test_command_without_a_command_line():
    engine = start_engine(build("cmd :: Command(localhost, nil);"))
    errors = [e for e in engine.events if e.kind is EventKind.NODE_ERROR]
    assert len(errors) == 1 and "no command configured" in errors[0].detail
