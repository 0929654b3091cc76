"""Small node classes and registries used across the engine tests."""
from __future__ import annotations

from tsgraph.registry import ConfigSpec, NodeClassSpec, NodeRegistry, PortSpec


def ticker_init(ctx):
    ctx.register_timer(float(ctx.config_text(1) or "1"))
    ctx.private["count"] = 0


def ticker_exec(ctx):
    n = ctx.private.get("count", 0)
    ctx.write(0, str(n))
    ctx.private["count"] = n + 1


def echo_exec(ctx):
    if ctx.has_news(0):
        ctx.write(0, ctx.read_input(0))


def sink_exec(ctx):
    for i in ctx.input_indices():
        ctx.read_input(i)


def failing_init(ctx):
    raise RuntimeError("refuses to start")


def failing_exec(ctx):
    raise RuntimeError("boom")


def make_registry() -> NodeRegistry:
    reg = NodeRegistry()
    out0 = (PortSpec("out0", "stream"),)
    in0 = (PortSpec("in0", "stream"),)
    reg.register(NodeClassSpec(
        "Ticker", "writes an increasing counter on a timer",
        configs=(ConfigSpec("period", "seconds between ticks"),),
        outputs=out0, init=ticker_init, exec=ticker_exec,
    ))
    reg.register(NodeClassSpec(
        "Echo", "copies its input delta to its output",
        inputs=in0, outputs=out0, exec=echo_exec,
    ))
    reg.register(NodeClassSpec(
        "Sink", "consumes everything, writes nothing",
        variadic_inputs=True, exec=sink_exec,
    ))
    reg.register(NodeClassSpec(
        "Brittle", "fails during init",
        inputs=in0, outputs=out0, init=failing_init,
    ))
    reg.register(NodeClassSpec(
        "Bomb", "fails during exec",
        inputs=in0, outputs=out0, exec=failing_exec,
    ))
    reg.register(NodeClassSpec(
        "View", "groups buffers for display", variadic_inputs=True,
        exec=sink_exec,
    ))
    return reg
