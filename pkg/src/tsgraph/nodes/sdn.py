"""Controller-facing nodes, flow-space filtering, and display nodes.

The Dpids/Flow-stat/Topology families query a controller's HTTP API at
the canonical /dpids, /flowstats/<dpid>, /topology endpoints; the class
suffix picks how the JSON answer is interpreted.  The plain -SDN
variants sniff the shape, the -pox/-floodlight/-odl variants expect it.
"""

from __future__ import annotations

import json
import re

import requests

from ..engine import NodeContext
from ..registry import ConfigSpec, NodeClassSpec, PortSpec
from .transform import collect_key_values, render_json_value

_FLAVORS = ("SDN", "pox", "floodlight", "odl")
_DPID_KEYS = {
    "pox": ("dpid",),
    "floodlight": ("switchDPID",),
    "odl": ("id",),
    "SDN": ("dpid", "switchDPID", "id"),
}

_ENABLE = PortSpec("enable", "Any new record triggers one query.")
_CONTROLLER = ConfigSpec(
    "controller",
    "Controller address: host, host:port, or full URL; default port 8080.",
    required=True,
)


def base_url(host: str) -> str:
    host = host.strip().rstrip("/")
    if "://" in host:
        return host
    if ":" in host:
        return f"http://{host}"
    return f"http://{host}:8080"


def _http_get(ctx: NodeContext, path: str) -> str:
    url = base_url(ctx.config_text(1) or "") + path
    try:
        response = requests.get(url, timeout=5)
    except requests.RequestException as err:
        ctx.write(0, f"ERROR: {err}\n")
        raise RuntimeError(f"{ctx.instance_id}: GET {url} failed: {err}") from err
    if response.status_code != 200:
        ctx.write(0, f"ERROR: HTTP {response.status_code} for {url}\n")
        raise RuntimeError(f"{ctx.instance_id}: HTTP {response.status_code} for {url}")
    return response.text


def _consume_trigger(ctx: NodeContext) -> bool:
    """Standard query-node gate: run once per batch of news."""
    if ctx.input_edges():
        if not ctx.has_news():
            return False
        for index in ctx.input_indices():
            ctx.read_input(index)
    return True


def _load_json(ctx: NodeContext, body: str):
    try:
        return json.loads(body)
    except ValueError as err:
        ctx.write(0, f"ERROR: controller answer is not JSON: {err}\n")
        raise RuntimeError(f"{ctx.instance_id}: controller answer is not JSON") from err


def _dpids_exec(flavor: str):
    def execute(ctx: NodeContext) -> None:
        if not _consume_trigger(ctx):
            return
        tree = _load_json(ctx, _http_get(ctx, "/dpids"))
        for key in _DPID_KEYS[flavor]:
            values = collect_key_values(tree, [key])
            if values:
                ctx.write(0, "\n".join(render_json_value(v) for v in values) + "\n")
                return
        ctx.write(0, "")

    return execute


def _normalize_flow_entry(flavor: str, entry: dict) -> str:
    fields: dict[str, str] = {}

    def put(key: str, value) -> None:
        if value is None:
            return
        text = render_json_value(value)
        if key in ("nw_src", "nw_dst") and text.endswith("/32"):
            text = text[: -len("/32")]
        fields[key] = text

    if flavor == "floodlight" or (flavor == "SDN" and "match" in entry and "ipv4_src" in entry.get("match", {})):
        match = entry.get("match", {})
        put("nw_src", match.get("ipv4_src"))
        put("nw_dst", match.get("ipv4_dst"))
        put("actions", entry.get("instructions", {}).get("apply_actions"))
        rest = {k: v for k, v in entry.items() if k not in ("match", "instructions")}
    elif flavor == "odl" or (flavor == "SDN" and "match" in entry):
        match = entry.get("match", {})
        put("nw_src", match.get("ipv4-source"))
        put("nw_dst", match.get("ipv4-destination"))
        put("actions", entry.get("actions"))
        rest = {k: v for k, v in entry.items() if k not in ("match", "actions")}
    else:
        put("nw_src", entry.get("nw_src"))
        put("nw_dst", entry.get("nw_dst"))
        put("actions", entry.get("actions"))
        rest = {k: v for k, v in entry.items() if k not in ("nw_src", "nw_dst", "actions")}
    for key in sorted(rest):
        value = rest[key]
        if isinstance(value, (str, int, float, bool)):
            put(key, value)
    return ",".join(f"{k}={v}" for k, v in fields.items())


def _flow_entries(flavor: str, tree) -> list[dict]:
    for key in ("flowstats", "flows"):
        if isinstance(tree, dict) and key in tree:
            return [e for e in tree[key] if isinstance(e, dict)]
    if isinstance(tree, dict) and "flow-statistics" in tree:
        flows = tree["flow-statistics"].get("flow", [])
        return [e for e in flows if isinstance(e, dict)]
    if isinstance(tree, list):
        return [e for e in tree if isinstance(e, dict)]
    return []


def _flow_stat_exec(flavor: str):
    def execute(ctx: NodeContext) -> None:
        if not _consume_trigger(ctx):
            return
        dpid = (ctx.latest_input_record(0) or "").strip().splitlines()
        if not dpid or not dpid[0]:
            return
        tree = _load_json(ctx, _http_get(ctx, f"/flowstats/{dpid[0]}"))
        lines = [_normalize_flow_entry(flavor, entry) for entry in _flow_entries(flavor, tree)]
        ctx.write(0, "".join(line + "\n" for line in lines))

    return execute


def _topology_links(flavor: str, tree) -> list[tuple[str, str]]:
    links: list[tuple[str, str]] = []
    if isinstance(tree, dict) and "links" in tree:
        for link in tree["links"]:
            links.append((str(link.get("src", "?")), str(link.get("dst", "?"))))
    elif isinstance(tree, list):
        for link in tree:
            if isinstance(link, dict):
                links.append((str(link.get("src-switch", "?")), str(link.get("dst-switch", "?"))))
    elif isinstance(tree, dict) and "topology" in tree:
        for topo in tree["topology"]:
            for link in topo.get("link", []):
                src = collect_key_values(link, ["source-node"])
                dst = collect_key_values(link, ["dest-node"])
                if src and dst:
                    links.append((str(src[0]), str(dst[0])))
    return links


def _topology_exec(flavor: str):
    def execute(ctx: NodeContext) -> None:
        if not _consume_trigger(ctx):
            return
        tree = _load_json(ctx, _http_get(ctx, "/topology"))
        links = _topology_links(flavor, tree)
        ctx.write(0, "".join(f"{src} -> {dst}\n" for src, dst in links))

    return execute


def rest_api_init(ctx: NodeContext) -> None:
    method = (ctx.config_text(2) or "GET").upper()
    if method not in ("GET", "POST", "PUT", "DELETE"):
        raise ValueError(f"{ctx.instance_id}: unsupported method {method!r}")
    if not ctx.config_text(1):
        raise ValueError(f"{ctx.instance_id}: missing URL config")


def rest_api_exec(ctx: NodeContext) -> None:
    if not _consume_trigger(ctx):
        return
    url = ctx.config_text(1)
    method = (ctx.config_text(2) or "GET").upper()
    body = ctx.latest_input_record(0) if ctx.input_edges(0) else None
    try:
        response = requests.request(method, url, data=body, timeout=5)
    except requests.RequestException as err:
        ctx.write(0, f"ERROR: {err}\n")
        ctx.write(1, "0")
        return
    ctx.write(0, response.text)
    ctx.write(1, str(response.status_code))


_ENTRY_FIELD = re.compile(r"([^=,]+)=([^,]*)")


def parse_flow_entry(line: str) -> dict[str, str] | None:
    """key=value fields of one dump line, or None when unparseable."""
    line = line.strip()
    if not line or line.startswith("#") or "=" not in line:
        return None
    fields: dict[str, str] = {}
    for chunk in line.split(","):
        if "=" not in chunk:
            continue
        key, _, value = chunk.partition("=")
        fields[key.strip()] = value.strip()
    return fields or None


def flow_space_filter_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    src = ctx.config_text(1)
    dst = ctx.config_text(2)
    dropped = 0
    kept: list[str] = []
    for index in ctx.input_indices():
        for line in ctx.read_input(index).splitlines(keepends=True):
            if not line.strip():
                continue
            fields = parse_flow_entry(line)
            if fields is None:
                dropped += 1
                continue
            if src is not None and fields.get("nw_src") != src:
                continue
            if dst is not None and fields.get("nw_dst") != dst:
                continue
            kept.append(line if line.endswith("\n") else line + "\n")
    if kept:
        ctx.write(0, "".join(kept))
    ctx.write(0, f"# {dropped} dropped\n")


def table_view_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    entries: dict[int, list[dict[str, str]]] = ctx.private.setdefault("entries", {})
    for index in ctx.input_indices():
        for line in ctx.read_input(index).splitlines():
            fields = parse_flow_entry(line)
            if fields is not None:
                entries.setdefault(index, []).append(fields)
    ctx.write(0, render_table(ctx.input_indices(), entries))


def render_table(indices: list[int], entries: dict[int, list[dict[str, str]]]) -> str:
    sections: list[str] = []
    for index in indices:
        rows = entries.get(index, [])
        columns: list[str] = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        lines: list[str] = []
        if len(indices) > 1:
            lines.append(f"input {index}")
        if columns:
            widths = [
                max(len(col), *(len(row.get(col, "")) for row in rows)) for col in columns
            ]
            lines.append("  ".join(col.ljust(widths[i]) for i, col in enumerate(columns)).rstrip())
            for row in rows:
                lines.append(
                    "  ".join(row.get(col, "").ljust(widths[i]) for i, col in enumerate(columns)).rstrip()
                )
        else:
            lines.append("(no entries)")
        sections.append("\n".join(lines))
    return "\n\n".join(sections) + "\n"


_EDGE_LINE = re.compile(r"^\s*(\S+)\s*->\s*(\S+)\s*$")


def graph_exec(ctx: NodeContext) -> None:
    if not ctx.has_news():
        return
    edges: list[tuple[str, str]] = ctx.private.setdefault("edges", [])
    for index in ctx.input_indices():
        for line in ctx.read_input(index).splitlines():
            match = _EDGE_LINE.match(line)
            if match:
                pair = (match.group(1), match.group(2))
                if pair not in edges:
                    edges.append(pair)
    body = "".join(f'  "{src}" -> "{dst}";\n' for src, dst in edges)
    ctx.write_self("digraph topology {\n" + body + "}\n")


def sdn_specs() -> list[NodeClassSpec]:
    specs: list[NodeClassSpec] = []
    for flavor in _FLAVORS:
        specs.append(
            NodeClassSpec(
                class_name=f"Dpids-{flavor}",
                doc="Collects datapath identifiers from the controller.",
                inputs=(_ENABLE,),
                configs=(_CONTROLLER,),
                outputs=(PortSpec("dpids", "One datapath id per line."),),
                exec=_dpids_exec(flavor),
                autostart=True,
            )
        )
        specs.append(
            NodeClassSpec(
                class_name=f"Flow-stat-{flavor}",
                doc="Flow statistics for the switch named by the input record.",
                inputs=(PortSpec("dpid", "Datapath id of the switch to query."),),
                configs=(_CONTROLLER,),
                outputs=(PortSpec("flows", "One key=value,... entry per line."),),
                exec=_flow_stat_exec(flavor),
            )
        )
        specs.append(
            NodeClassSpec(
                class_name=f"Topology-{flavor}",
                doc="Topology links known to the controller.",
                inputs=(_ENABLE,),
                configs=(_CONTROLLER,),
                outputs=(PortSpec("links", "One 'src -> dst' line per link."),),
                exec=_topology_exec(flavor),
                autostart=True,
            )
        )
    specs.append(
        NodeClassSpec(
            class_name="Rest-api",
            doc="Performs one HTTP call per trigger.",
            inputs=(PortSpec("body", "Request body for POST and PUT."),),
            configs=(
                ConfigSpec("url", "Request URL.", required=True),
                ConfigSpec("method", "GET, POST, PUT, or DELETE; default GET."),
            ),
            outputs=(
                PortSpec("body", "Response body."),
                PortSpec("status", "HTTP status code, 0 on transport failure."),
            ),
            init=rest_api_init,
            exec=rest_api_exec,
            autostart=True,
        )
    )
    specs.append(
        NodeClassSpec(
            class_name="Flow-space-filter",
            doc="Keeps flow entries matching the configured source and destination.",
            inputs=(PortSpec("flows", "Flow dump, one key=value,... entry per line."),),
            configs=(
                ConfigSpec("src", "Required nw_src value; nil matches anything."),
                ConfigSpec("dst", "Required nw_dst value; nil matches anything."),
            ),
            outputs=(PortSpec("flows", "Matching entries plus a '# N dropped' summary."),),
            exec=flow_space_filter_exec,
            variadic_inputs=True,
        )
    )
    specs.append(
        NodeClassSpec(
            class_name="Table-view",
            doc="Renders key=value entries from each input as a text table.",
            inputs=(PortSpec("entries", "key=value,... lines to tabulate."),),
            outputs=(PortSpec("table", "Rendered table; the latest record is current."),),
            exec=table_view_exec,
            variadic_inputs=True,
        )
    )
    specs.append(
        NodeClassSpec(
            class_name="Graph",
            doc="Collects 'src -> dst' lines and renders them as a DOT digraph.",
            inputs=(PortSpec("links", "One 'src -> dst' line per edge."),),
            exec=graph_exec,
            variadic_inputs=True,
        )
    )
    specs.append(
        NodeClassSpec(
            class_name="View",
            doc="Groups node outputs into one display surface.",
            inputs=(PortSpec("slot", "Anything to show in this slot."),),
            variadic_inputs=True,
        )
    )
    return specs
