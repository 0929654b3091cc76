"""Wrapper node classes around everyday troubleshooting tools.

Each class is a ToolSpec plus port documentation.  A wrapper with no
connected input runs once at engine start; a connected input acts as an
enable signal and every new record triggers another run.
"""

from __future__ import annotations

import re

from ..engine import NodeContext
from ..registry import ConfigSpec, NodeClassSpec, PortSpec
from .proc import ToolSpec, ToolError, cfg, lit, run_tool

_ENABLE = PortSpec("enable", "Any new record starts one run of the wrapped tool.")
_RAW = PortSpec("raw", "Tool output, relayed unmodified.")
_HOST = ConfigSpec("host", "Host the tool runs on; empty or localhost runs it here.")


def _tool_exec(spec: ToolSpec):
    def execute(ctx: NodeContext) -> None:
        if ctx.input_edges():
            if not ctx.has_news():
                return
            for index in ctx.input_indices():
                ctx.read_input(index)
        run_tool(ctx, spec)

    return execute


def _exclude_sections(ctx: NodeContext, text: str) -> str:
    """Drop config-listed interface sections from interface-config output."""
    from ..functions import ifconfig_sections

    raw = ctx.config_text(2)
    if not raw:
        return text
    excluded = {name for name in re.split(r"[\s,]+", raw) if name}
    kept = [block for name, block in ifconfig_sections(text) if name not in excluded]
    joined = "\n".join(kept)
    if joined and text.endswith("\n"):
        joined += "\n"
    return joined


_HOP_LINE = re.compile(r"^\s*(\d+)\s+(.*)$")
_PAREN_ADDR = re.compile(r"\(([^()\s]+)\)")


def trace_status(ctx: NodeContext, text: str) -> None:
    """Write the reachability verdict for a completed trace to out1.

    Success <target> when the final hop is the target, otherwise
    LastHop <address> for the deepest responding hop, LastHop none when
    every probe went unanswered.
    """
    target = (ctx.config_text(2) or "").strip()
    hops: list[str | None] = []
    for line in text.splitlines():
        match = _HOP_LINE.match(line)
        if not match:
            continue
        body = match.group(2).strip()
        if not body or set(body.split()) <= {"*"}:
            hops.append(None)
            continue
        paren = _PAREN_ADDR.search(body)
        hops.append(paren.group(1) if paren else body.split()[0])
    if not hops:
        ctx.write(1, "LastHop none\n")
        if text.strip():
            raise ToolError("unparseable trace output")
        return
    last = hops[-1]
    if last is not None and target and _names_target(text, last, target):
        ctx.write(1, f"Success {target}\n")
        return
    responding = [addr for addr in hops if addr is not None]
    if not responding:
        ctx.write(1, "LastHop none\n")
        return
    ctx.write(1, f"LastHop {responding[-1]}\n")


def _names_target(text: str, last: str, target: str) -> bool:
    if last == target:
        return True
    # The final hop may print a hostname with the address in parens.
    for line in text.splitlines()[::-1]:
        match = _HOP_LINE.match(line)
        if match and last in line:
            return target in line
    return False


def clock_init(ctx: NodeContext) -> None:
    raw = ctx.config_text(1)
    try:
        period = float(raw) if raw is not None else None
    except ValueError:
        period = None
    if period is None or period <= 0:
        raise ValueError(f"period must be a positive number of seconds, got {raw!r}")
    ctx.private["period"] = period
    ctx.private["count"] = 0
    ctx.register_timer(period)


def clock_exec(ctx: NodeContext) -> None:
    count = ctx.private.get("count", 0)
    ctx.write(0, str(count))
    ctx.private["count"] = count + 1


def _wrapper(class_name: str, doc: str, spec: ToolSpec, configs: list[ConfigSpec],
             outputs: list[PortSpec] | None = None,
             variadic_configs: bool = False) -> NodeClassSpec:
    return NodeClassSpec(
        class_name=class_name,
        doc=doc,
        inputs=(_ENABLE,),
        configs=tuple(configs),
        outputs=tuple(outputs or [_RAW]),
        exec=_tool_exec(spec),
        autostart=True,
        variadic_configs=variadic_configs,
    )


def _command_exec(ctx: NodeContext) -> None:
    if ctx.input_edges():
        if not ctx.has_news():
            return
        for index in ctx.input_indices():
            ctx.read_input(index)
    parts = []
    index = 2
    while True:
        value = ctx.config_text(index)
        if value is None:
            if ctx.config_value(index) is None:
                break
        else:
            parts.append(value)
        index += 1
    if not parts:
        raise ToolError(f"{ctx.instance_id}: no command configured")
    spec = ToolSpec(command=(lit("sh"), lit("-c"), lit(" ".join(parts))))
    run_tool(ctx, spec)


def wrapper_specs() -> list[NodeClassSpec]:
    specs = [
        _wrapper(
            "Ping",
            "Connectivity test: wraps the ping command against a target address.",
            ToolSpec(command=(lit("ping"), lit("-c"), lit("4"), cfg(2))),
            [_HOST, ConfigSpec("target", "Address to ping.", required=True)],
        ),
        _wrapper(
            "Ifconfig",
            "Interface configuration dump via the ifconfig command.",
            ToolSpec(command=(lit("ifconfig"), lit("-a")), transform=_exclude_sections),
            [_HOST, ConfigSpec("exclude", "Interfaces to drop from the output.")],
        ),
        _wrapper(
            "Arp",
            "Neighbour cache dump via the arp command, optionally per interface.",
            ToolSpec(command=(lit("arp"), cfg(2, flag="-i", optional=True), cfg(3, optional=True))),
            [
                _HOST,
                ConfigSpec("interface", "Restrict the query to one interface."),
                ConfigSpec("flags", "Extra arp switch such as -n."),
            ],
        ),
        _wrapper(
            "Route",
            "Routing table entries that apply to the configured address.",
            ToolSpec(
                command=(lit("route"), lit("-n")),
                parse_mode="line-filtered",
                filter_config=2,
            ),
            [_HOST, ConfigSpec("address", "Address the displayed routes must cover.")],
        ),
        _wrapper(
            "Iptables",
            "Firewall rules that apply to the configured address.",
            ToolSpec(
                command=(lit("iptables"), lit("-L"), lit("-n")),
                parse_mode="line-filtered",
                filter_config=2,
            ),
            [_HOST, ConfigSpec("address", "Address the displayed rules must mention.")],
        ),
        _wrapper(
            "Host",
            "Name resolution through the host lookup command.",
            ToolSpec(command=(lit("host"), cfg(2))),
            [_HOST, ConfigSpec("name", "Name to resolve.", required=True)],
        ),
        _wrapper(
            "Iperf",
            "Throughput measurement against an iperf server.",
            ToolSpec(command=(lit("iperf"), lit("-c"), cfg(2), cfg(3, optional=True))),
            [
                _HOST,
                ConfigSpec("server", "Iperf server to measure against.", required=True),
                ConfigSpec("extra", "Additional iperf switches."),
            ],
        ),
        _wrapper(
            "Traceroute",
            "Path probe; reports the deepest reachable hop on a second output.",
            ToolSpec(command=(lit("traceroute"), cfg(2)), extractors=(trace_status,)),
            [_HOST, ConfigSpec("target", "Address to trace towards.", required=True)],
            outputs=[
                _RAW,
                PortSpec("status", "Success <target> or LastHop <address> or LastHop none."),
            ],
        ),
    ]
    specs.append(
        NodeClassSpec(
            class_name="Command",
            doc="Wraps an arbitrary shell command line.",
            inputs=(_ENABLE,),
            configs=(
                _HOST,
                ConfigSpec("command", "Command line; further configs are appended.", required=True),
            ),
            outputs=(_RAW,),
            exec=_command_exec,
            autostart=True,
            variadic_configs=True,
        )
    )
    specs.append(
        NodeClassSpec(
            class_name="Clock",
            doc="Writes a monotone tick counter every period seconds.",
            configs=(ConfigSpec("period", "Seconds between ticks, positive.", required=True),),
            outputs=(PortSpec("tick", "Tick counter starting at 0."),),
            init=clock_init,
            exec=clock_exec,
        )
    )
    return specs
