"""Text-processing nodes: Function, Filter, Format, Json-filter, Tee."""

from __future__ import annotations

import json
import re

from ..engine import NodeContext
from ..expr import ExprError, compile_expr, eval_expr, looks_like_expr
from ..functions import FunctionError, call_function, lookup_function
from ..registry import ConfigSpec, NodeClassSpec, PortSpec

_SELECTOR_RE = re.compile(r"^'?input(?:-(\d+))?$")
_PLACEHOLDER_RE = re.compile(r"\{(\d+)\}")


def _parse_selector(text: str) -> int:
    match = _SELECTOR_RE.match(text.strip())
    if not match:
        raise ValueError(f"bad input selector {text!r}; expected input-N")
    return int(match.group(1) or 0)


def function_init(ctx: NodeContext) -> None:
    fn = ctx.config_text(1)
    if not fn:
        raise ValueError(f"{ctx.instance_id}: missing function config")
    if looks_like_expr(fn):
        ctx.private["program"] = compile_expr(fn)
    else:
        lookup_function(fn)
        ctx.private["name"] = fn
    selectors = []
    index = 2
    while True:
        value = ctx.config_value(index)
        if value is None:
            break
        text = value.as_text()
        if text is not None:
            selectors.append(_parse_selector(text))
        index += 1
    ctx.private["selectors"] = selectors or [0]


def function_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    for index in ctx.input_indices():
        ctx.read_input(index)
    args = []
    for selector in ctx.private["selectors"]:
        text = ctx.latest_input_record(selector)
        args.append(text if text is not None else "")
    try:
        if "program" in ctx.private:
            result = eval_expr(ctx.private["program"], args)
        else:
            result = call_function(ctx.private["name"], args)
    except (ExprError, FunctionError) as err:
        raise RuntimeError(f"{ctx.instance_id}: {err}") from err
    if result is False:
        return
    _fan_out(ctx, result)


def _fan_out(ctx: NodeContext, result: str) -> None:
    """Whole result to out0, or line-split across connected outputs."""
    connected = sorted(
        {e.src.output_index for e in ctx.tsg.edges_from(ctx.instance_id) if not e.src.is_self}
    )
    width = (connected[-1] + 1) if connected else 1
    if width <= 1:
        ctx.write(0, result)
        return
    lines = result.splitlines()
    for index in range(width):
        if index == width - 1 and len(lines) > width:
            ctx.write(index, "\n".join(lines[index:]))
        elif index < len(lines):
            ctx.write(index, lines[index])


def filter_init(ctx: NodeContext) -> None:
    pattern = ctx.config_text(1)
    if pattern is None:
        raise ValueError(f"{ctx.instance_id}: missing pattern config")
    try:
        ctx.private["pattern"] = re.compile(pattern)
    except re.error as err:
        raise ValueError(f"{ctx.instance_id}: bad pattern {pattern!r}: {err}") from err


def filter_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    pattern: re.Pattern = ctx.private["pattern"]
    out = []
    for index in ctx.input_indices():
        for line in ctx.read_input(index).splitlines(keepends=True):
            bare = line.rstrip("\r\n")
            ending = line[len(bare) :]
            if bare and pattern.search(bare):
                out.append(f">>> {bare} <<<{ending}")
            else:
                out.append(line)
    if out:
        ctx.write(0, "".join(out))


def format_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    for index in ctx.input_indices():
        ctx.read_input(index)
    template = ctx.config_text(1) or ""
    connected = set(ctx.input_indices())

    def substitute(match: re.Match) -> str:
        index = int(match.group(1))
        if index not in connected:
            raise RuntimeError(
                f"{ctx.instance_id}: placeholder {{{index}}} has no connected input"
            )
        return ctx.latest_input_record(index) or ""

    ctx.write(0, _PLACEHOLDER_RE.sub(substitute, template))


def collect_key_values(tree, path: list[str]) -> list:
    """Document-order values for the key path.

    A single segment matches the key at any depth; multiple segments
    must match consecutively from where the first segment occurs.
    """
    found: list = []

    def walk(node, trail: list[str]):
        if isinstance(node, dict):
            for key, value in node.items():
                if key == path[0]:
                    _descend(value, path[1:], found)
                walk(value, trail + [key])
        elif isinstance(node, list):
            for item in node:
                walk(item, trail)

    def _descend(node, rest: list[str], sink: list):
        if not rest:
            sink.append(node)
            return
        if isinstance(node, dict) and rest[0] in node:
            _descend(node[rest[0]], rest[1:], sink)
        elif isinstance(node, list):
            for item in node:
                _descend(item, rest, sink)

    walk(tree, [])
    return found


def render_json_value(value) -> str:
    if isinstance(value, str):
        return value
    if value is None or isinstance(value, (int, float, bool)):
        return json.dumps(value)
    return json.dumps(value, sort_keys=True)


def json_filter_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    path = (ctx.config_text(1) or "").split(".")
    if not path or not path[0]:
        raise RuntimeError(f"{ctx.instance_id}: missing key config")
    for index in ctx.input_indices():
        delta = ctx.read_input(index)
        if not delta.strip():
            continue
        try:
            tree = json.loads(delta)
        except ValueError as err:
            ctx.write(0, f"ERROR: {err}\n")
            raise RuntimeError(f"{ctx.instance_id}: input is not JSON: {err}") from err
        values = collect_key_values(tree, path)
        if values:
            ctx.write(0, "\n".join(render_json_value(v) for v in values) + "\n")
        else:
            ctx.write(0, "")


def tee_init(ctx: NodeContext) -> None:
    if not ctx.config_text(1):
        raise ValueError(f"{ctx.instance_id}: missing file path config")


def tee_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    path = ctx.config_text(1)
    chunks = [ctx.read_input(index) for index in ctx.input_indices()]
    text = "".join(chunks)
    ctx.write(0, text)
    if not text:
        return
    try:
        with open(path, "a", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as err:
        raise RuntimeError(f"{ctx.instance_id}: cannot append to {path}: {err}") from err


def transform_specs() -> list[NodeClassSpec]:
    data_in = PortSpec("data", "Text stream to process.")
    return [
        NodeClassSpec(
            class_name="Function",
            doc="Applies a named function or (expression) to selected inputs.",
            inputs=(PortSpec("data", "Trigger and argument source."),),
            configs=(
                ConfigSpec("function", "Registry function name or (expression).", required=True),
                ConfigSpec("selector", "input-N arguments, in order; default input-0."),
            ),
            outputs=(PortSpec("result", "Function result; lines fan out when more outputs are wired."),),
            init=function_init,
            exec=function_exec,
            variadic_inputs=True,
            variadic_configs=True,
            variadic_outputs=True,
        ),
        NodeClassSpec(
            class_name="Filter",
            doc="Marks lines matching a regular expression with >>> <<< delimiters.",
            inputs=(data_in,),
            configs=(ConfigSpec("pattern", "Regular expression to mark.", required=True),),
            outputs=(PortSpec("marked", "Input lines, matches wrapped in markers."),),
            init=filter_init,
            exec=filter_exec,
            variadic_inputs=True,
        ),
        NodeClassSpec(
            class_name="Format",
            doc="Assembles a template, substituting {N} with the latest input records.",
            inputs=(PortSpec("value", "Record source for the matching {N}."),),
            configs=(ConfigSpec("template", "Text with {N} placeholders.", required=True),),
            outputs=(PortSpec("text", "Assembled result per trigger."),),
            exec=format_exec,
            variadic_inputs=True,
        ),
        NodeClassSpec(
            class_name="Json-filter",
            doc="Extracts every value of a key (dot path) from JSON input.",
            inputs=(data_in,),
            configs=(ConfigSpec("key", "Key or dot-separated path.", required=True),),
            outputs=(PortSpec("values", "Newline-joined extracted values."),),
            exec=json_filter_exec,
            variadic_inputs=True,
        ),
        NodeClassSpec(
            class_name="Tee",
            doc="Forwards input unchanged while appending it to a file.",
            inputs=(data_in,),
            configs=(ConfigSpec("path", "File that receives a copy.", required=True),),
            outputs=(PortSpec("copy", "Input text, forwarded verbatim."),),
            init=tee_init,
            exec=tee_exec,
            variadic_inputs=True,
        ),
    ]
