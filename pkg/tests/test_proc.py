"""Tool-execution plumbing: argv templates, transports, stubs, filtering."""
from __future__ import annotations

import ipaddress
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from tsgraph.engine import Engine, start_engine
from tsgraph.graph import build_graph
from tsgraph.lang import parse_document
from tsgraph.nodes import build_default_registry
from tsgraph.nodes.proc import (
    LocalTransport,
    LoopbackTransport,
    SshTransport,
    ToolError,
    ToolSpec,
    cfg,
    filter_address_lines,
    lit,
    pick_transport,
    resolve_argv,
    run_tool,
    stub_path,
    _looks_like_mask,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def context(text, instance_id, **engine_kwargs):
    tsg = build_graph(parse_document(text), build_default_registry())
    engine = Engine(tsg, **engine_kwargs)
    return engine.context_for(instance_id)


# -- argv resolution ---------------------------------------------------------


def test_resolve_literals_and_configs():
    ctx = context("a :: Arp(localhost, eth0, -n);", "a")
    spec = ToolSpec(command=(lit("arp"), cfg(2, flag="-i"), cfg(3)))
    assert resolve_argv(ctx, spec) == ["arp", "-i", "eth0", "-n"]


def test_resolve_optional_part_vanishes():
    ctx = context("a :: Arp(localhost, nil, nil);", "a")
    spec = ToolSpec(command=(lit("arp"), cfg(2, flag="-i", optional=True), cfg(3, optional=True)))
    assert resolve_argv(ctx, spec) == ["arp"]


def test_resolve_required_missing_is_an_error():
    ctx = context("a :: Arp(localhost, nil, -n);", "a")
    spec = ToolSpec(command=(lit("arp"), cfg(2)))
    with pytest.raises(ToolError, match="config 2 of a is empty"):
        resolve_argv(ctx, spec)


def test_resolve_trims_value_to_first_line():
    ctx = context("a :: Arp(localhost, nil, -n);", "a")
    ctx.engine.tsg.node("a").dynamic_configs[2] = "eth0\nwlan0\n"
    spec = ToolSpec(command=(lit("arp"), cfg(2, flag="-i")))
    assert resolve_argv(ctx, spec) == ["arp", "-i", "eth0"]


# -- stub transcripts --------------------------------------------------------


def test_stub_path_picks_lexicographic_first(tmp_path):
    (tmp_path / "Ping.b.txt").write_text("b")
    (tmp_path / "Ping.a.txt").write_text("a")
    (tmp_path / "Arp.x.txt").write_text("x")
    ctx = context("ping :: Ping(localhost, 10.0.2.80);", "ping", stub_dir=str(tmp_path))
    assert stub_path(ctx) == str(tmp_path / "Ping.a.txt")


def test_stub_path_missing_class(tmp_path):
    ctx = context("ping :: Ping(localhost, 10.0.2.80);", "ping", stub_dir=str(tmp_path))
    with pytest.raises(ToolError, match="no stub transcript for class 'Ping'"):
        stub_path(ctx)


def test_stub_relay_preserves_bytes_and_appends_pulse(tmp_path):
    text = "line one\nline two\nno trailing newline"
    (tmp_path / "Ping.case.txt").write_text(text)
    ctx = context("ping :: Ping(localhost, 10.0.2.80);", "ping", stub_dir=str(tmp_path))
    run_tool(ctx, ToolSpec(command=(lit("ping"),)))
    records = [r.text for r in ctx.engine.buffers["ping:out0"].records]
    assert records[-1] == ""
    assert "".join(records) == text


def test_empty_stub_still_pulses(tmp_path):
    (tmp_path / "Ping.empty.txt").write_text("")
    ctx = context("ping :: Ping(localhost, 10.0.2.80);", "ping", stub_dir=str(tmp_path))
    run_tool(ctx, ToolSpec(command=(lit("ping"),)))
    assert [r.text for r in ctx.engine.buffers["ping:out0"].records] == [""]


# -- transports --------------------------------------------------------------


def test_ssh_transport_quotes_the_remote_command():
    wrapped = SshTransport().wrap("gw.example", ["route", "-n"])
    assert wrapped == ["ssh", "-o", "BatchMode=yes", "gw.example", "route -n"]


def test_local_transport_is_identity():
    assert LocalTransport().wrap("localhost", ["ls"]) == ["ls"]


def test_pick_transport_by_host():
    ctx = context("a :: Arp(localhost, nil, nil);", "a")
    assert isinstance(pick_transport(ctx, "localhost"), LocalTransport)
    assert isinstance(pick_transport(ctx, ""), LocalTransport)
    assert isinstance(pick_transport(ctx, None), LocalTransport)
    assert isinstance(pick_transport(ctx, "gw.example"), SshTransport)


def test_loopback_transport_wins_and_records():
    loopback = LoopbackTransport()
    ctx = context("a :: Arp(localhost, nil, nil);", "a",
                  transports={"loopback": loopback})
    assert pick_transport(ctx, "gw.example") is loopback
    loopback.wrap("gw.example", ["arp"])
    assert loopback.calls == [("gw.example", ("arp",))]


# -- synchronous subprocess mode ---------------------------------------------


def test_sync_run_relays_and_pulses():
    ctx = context("c :: Command(localhost, true);", "c")
    run_tool(ctx, ToolSpec(command=(lit("echo"), lit("hi"))))
    assert [r.text for r in ctx.engine.buffers["c:out0"].records] == ["hi\n", ""]


def test_sync_run_unspawnable_command():
    ctx = context("c :: Command(localhost, true);", "c")
    with pytest.raises(ToolError, match="cannot spawn"):
        run_tool(ctx, ToolSpec(command=(lit("/no/such/binary-here"),)))
    records = [r.text for r in ctx.engine.buffers["c:out0"].records]
    assert len(records) == 1 and records[0].startswith("ERROR:")


# -- address line filtering --------------------------------------------------

ROUTE_DUMP = """\
Kernel IP routing table
Destination     Gateway         Genmask         Flags Metric Ref    Use Iface
0.0.0.0         10.0.0.1        0.0.0.0         UG    0      0        0 eth0
10.0.0.0        0.0.0.0         255.255.255.0   U     0      0        0 eth0
10.0.1.0        0.0.0.0         255.255.255.0   U     0      0        0 eth1
"""


def route_lines(address):
    return filter_address_lines(ROUTE_DUMP, address).splitlines()


def test_filter_keeps_covering_network():
    assert route_lines("10.0.0.77") == [
        "0.0.0.0         10.0.0.1        0.0.0.0         UG    0      0        0 eth0",
        "10.0.0.0        0.0.0.0         255.255.255.0   U     0      0        0 eth0",
    ]


def test_filter_gateway_zeroes_are_not_masks():
    # 10.0.2.80 is outside both /24s; only the default route may match it.
    assert route_lines("10.0.2.80") == [
        "0.0.0.0         10.0.0.1        0.0.0.0         UG    0      0        0 eth0",
    ]


def test_filter_without_default_route_can_be_empty():
    dump = "\n".join(line for line in ROUTE_DUMP.splitlines() if not line.startswith("0.0.0.0"))
    assert filter_address_lines(dump, "10.0.2.80") == ""


def test_filter_literal_substring():
    text = "Chain FORWARD (policy ACCEPT)\nChain INPUT (policy ACCEPT)\n"
    assert filter_address_lines(text, "FORWARD") == "Chain FORWARD (policy ACCEPT)\n"


def test_filter_cidr_field():
    line = "DROP       all  --  0.0.0.0/0            10.0.2.80\n"
    assert filter_address_lines(line, "10.9.9.9") == line


def test_filter_host_route_needs_literal_mention():
    # A /32 entry covers exactly one address, which the literal test already
    # handles; the network test must not fire on foreign single-host entries.
    text = "10.0.0.7        0.0.0.0         255.255.255.255 UH    0      0        0 eth0\n"
    assert filter_address_lines(text, "10.0.0.9") == ""
    assert filter_address_lines(text, "10.0.0.7") == text


@pytest.mark.parametrize("word,expected", [
    ("255.255.255.0", True),
    ("255.255.254.0", True),
    ("255.0.255.0", False),
    ("0.0.0.0", True),
    ("255.255.255.255", True),
    ("10.0.0.1", False),
    ("255.255.255", False),
    ("255.255.255.256", False),
    ("a.b.c.d", False),
])
def test_looks_like_mask(word, expected):
    assert _looks_like_mask(word) is expected


@given(st.integers(min_value=0, max_value=32))
def test_every_prefix_mask_is_recognized(prefix_len):
    mask = str(ipaddress.ip_network(f"0.0.0.0/{prefix_len}").netmask)
    assert _looks_like_mask(mask)


@given(st.text(alphabet="0123456789./ \n", max_size=200))
def test_filter_output_is_a_line_subsequence(text):
    kept = filter_address_lines(text, "10.0.0.1").splitlines(keepends=True)
    original = text.splitlines(keepends=True)
    it = iter(original)
    assert all(line in it for line in kept)
