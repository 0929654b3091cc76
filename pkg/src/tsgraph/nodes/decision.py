"""Conditional branching nodes: Decision and Decision-summary.

A Decision verifies each input with its own verifier, combines the
verdicts, and routes the outcome: out0 carries the positive string,
out1 a failure message, out2 a status record for summary nodes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..engine import NodeContext
from ..expr import ExprError, compile_expr, eval_expr, looks_like_expr
from ..functions import FunctionError, call_function, lookup_combiner
from ..registry import ConfigSpec, NodeClassSpec, PortSpec


@dataclass
class _Verifier:
    """One input's verification rule: a named function, an expression,
    or None for pass-through."""

    name: str | None = None
    program: object | None = None
    extra: str | None = None

    def run(self, text: str):
        if self.program is not None:
            return eval_expr(self.program, [text])
        if self.name is None:
            return text
        args = [] if self.extra is None else [self.extra]
        args.append(text)
        return call_function(self.name, args)


@dataclass
class _DecisionPlan:
    label: str
    verifiers: list[_Verifier]
    combiner_name: str


def _parse_plan(ctx: NodeContext) -> _DecisionPlan:
    label = ctx.config_text(1) or ctx.instance_id
    verifiers: list[_Verifier] = []
    combiner = "or"
    index = 2
    pending: list[str | None] = []
    while True:
        value = ctx.config_value(index)
        if value is None:
            break
        text = value.as_text()
        if text is not None and text.startswith("combine="):
            combiner = text[len("combine=") :]
            index += 1
            continue
        pending.append(text)
        index += 1
    # Slots pair up as (verifier, extra) per input.
    for i in range(0, len(pending), 2):
        spec = pending[i]
        extra = pending[i + 1] if i + 1 < len(pending) else None
        if spec is None:
            verifiers.append(_Verifier())
        elif looks_like_expr(spec):
            verifiers.append(_Verifier(program=compile_expr(spec), extra=extra))
        else:
            verifiers.append(_Verifier(name=spec, extra=extra))
    lookup_combiner(combiner)
    return _DecisionPlan(label=label, verifiers=verifiers, combiner_name=combiner)


def decision_init(ctx: NodeContext) -> None:
    plan = _parse_plan(ctx)
    connected = {edge.dst.index for edge in ctx.input_edges()}
    if len(plan.verifiers) > len(connected):
        raise ValueError(
            f"{plan.label}: {len(plan.verifiers)} verifiers for {len(connected)} inputs"
        )
    ctx.private["plan"] = plan
    ctx.private["last"] = {}
    ctx.private["details"] = {}
    ctx.private["evals"] = 0


def decision_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    plan: _DecisionPlan = ctx.private["plan"]
    last: dict = ctx.private["last"]
    details: dict = ctx.private["details"]
    for index in ctx.input_indices():
        if not ctx.has_news(index):
            continue
        text = ctx.read_input(index)
        verifier = plan.verifiers[index] if index < len(plan.verifiers) else _Verifier()
        try:
            result = verifier.run(text)
            detail = None
        except (ExprError, FunctionError) as err:
            result = False
            detail = str(err)
        last[index] = result
        details[index] = detail
    ordered = [last[i] for i in sorted(last)]
    combined = lookup_combiner(plan.combiner_name)(ordered)
    seq = ctx.private["evals"]
    ctx.private["evals"] = seq + 1
    if combined is not False:
        outcome, detail = "pass", combined
        ctx.write(0, combined + "\n")
    else:
        failures = []
        for i in sorted(last):
            if last[i] is False:
                failures.append(details.get(i) or f"input {i} failed verification")
        detail = "; ".join(failures) or "no input passed verification"
        outcome = "fail"
        ctx.write(1, f"{plan.label}: {detail}\n")
    status = {
        "label": plan.label,
        "result": outcome,
        "detail": detail,
        "seq": seq,
        "timestamp": ctx.clock_now(),
    }
    ctx.write(2, json.dumps(status, sort_keys=True) + "\n")


_SUMMARY_COLUMNS = ("decision", "result", "detail")


def summary_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    rows: dict[int, dict] = ctx.private.setdefault("rows", {})
    for index in ctx.input_indices():
        if not ctx.has_news(index):
            continue
        delta = ctx.read_input(index)
        for line in delta.splitlines():
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                rows[index] = {
                    "label": str(record["label"]),
                    "result": str(record["result"]),
                    "detail": str(record.get("detail", "")),
                }
            except (ValueError, KeyError, TypeError):
                rows[index] = {"label": f"input {index}", "result": "invalid", "detail": line}
    ctx.write(0, render_summary(ctx, rows))


def render_summary(ctx: NodeContext, rows: dict[int, dict]) -> str:
    body: list[tuple[str, str, str]] = []
    reporting: list[str] = []
    for index in ctx.input_indices():
        row = rows.get(index)
        if row is None:
            body.append((f"input {index}", "pending", ""))
            continue
        result = row["result"]
        if result in ("pass", "fail"):
            reporting.append(result)
        elif result == "invalid":
            reporting.append("fail")
        detail = row["detail"].replace("\n", "; ").strip()
        flag = " !" if result in ("fail", "invalid") else ""
        body.append((row["label"], result + flag, detail))
    if not reporting:
        overall = "pending"
    elif all(r == "pass" for r in reporting):
        overall = "pass"
    else:
        overall = "fail"
    body.append(("OVERALL", overall, ""))
    widths = [
        max(len(_SUMMARY_COLUMNS[col]), *(len(row[col]) for row in body))
        for col in range(3)
    ]
    lines = ["  ".join(name.ljust(widths[i]) for i, name in enumerate(_SUMMARY_COLUMNS)).rstrip()]
    for row in body:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(3)).rstrip())
    return "\n".join(lines) + "\n"


def decision_specs() -> list[NodeClassSpec]:
    return [
        NodeClassSpec(
            class_name="Decision",
            doc="Verifies each input and branches on the combined verdict.",
            inputs=(PortSpec("data", "Streams to verify, one verifier per input."),),
            configs=(
                ConfigSpec("label", "Name shown in status records and summaries."),
                ConfigSpec(
                    "verifier",
                    "Named function or (expression) for input 0; later pairs "
                    "repeat per input; a final combine=<fn> picks the combiner.",
                ),
                ConfigSpec("extra", "Leading argument for the paired verifier."),
            ),
            outputs=(
                PortSpec("positive", "Combined result string when the decision passes."),
                PortSpec("negative", "Failure message when the decision fails."),
                PortSpec("status", "One JSON status record per evaluation."),
            ),
            init=decision_init,
            exec=decision_exec,
            variadic_inputs=True,
            variadic_configs=True,
        ),
        NodeClassSpec(
            class_name="Decision-summary",
            doc="Tabulates connected Decision statuses with an OVERALL verdict.",
            inputs=(PortSpec("status", "Status output of one Decision node."),),
            outputs=(PortSpec("table", "Rendered summary; the latest record is current."),),
            exec=summary_exec,
            variadic_inputs=True,
        ),
    ]
