"""Graph objects built from a document, kept in sync with it.

build_graph instantiates declarations and inferred Views, then lays
edges following the positional pairing rule.  Runtime mutations
(add_edge, set_config_value) append or rewrite statements in the origin
document, so serializing it always reproduces the live graph.
"""
from __future__ import annotations

import enum
import os
import tempfile
from dataclasses import dataclass, field, replace

from .lang.ast import (
    ARROW,
    ConfigKind,
    ConfigValue,
    Endpoint,
    LinkChain,
    NIL,
    NodeDecl,
    PortKind,
    PortRef,
    SELF_ARROW,
    TsgDocument,
)
from .lang.printer import serialize_document
from .lang.validate import VIEW_CLASS, declared_names
from .registry import NodeClassSpec, NodeRegistry

_IMPLICIT_IN = (PortRef(PortKind.INPUT, 0),)
_IMPLICIT_OUT = (PortRef(PortKind.OUTPUT, 0),)


class BuildError(Exception):
    pass


class NodeState(str, enum.Enum):
    CREATED = "created"
    INITIALIZED = "initialized"
    RUNNING = "running"
    TERMINATED = "terminated"


_STATE_RANK = {
    NodeState.CREATED: 0,
    NodeState.INITIALIZED: 1,
    NodeState.RUNNING: 2,
    NodeState.TERMINATED: 3,
}


@dataclass
class NodeInstance:
    instance_id: str
    class_name: str
    configs: list[ConfigValue]
    state: NodeState = NodeState.CREATED
    # Values received over config links, keyed by 1-based slot.
    dynamic_configs: dict[int, str] = field(default_factory=dict)
    # Scratch space for the node behavior, private to the instance.
    private: dict = field(default_factory=dict)

    def advance_state(self, state: NodeState) -> None:
        if _STATE_RANK[state] < _STATE_RANK[self.state]:
            raise BuildError(
                f"{self.instance_id}: cannot move from {self.state.value} to {state.value}")
        self.state = state


@dataclass(frozen=True)
class EdgeSrc:
    instance_id: str
    output_index: int | None  # None names the node itself

    @property
    def is_self(self) -> bool:
        return self.output_index is None


@dataclass(frozen=True)
class EdgeDst:
    instance_id: str
    kind: PortKind
    index: int


@dataclass(frozen=True)
class Edge:
    edge_id: str
    src: EdgeSrc
    dst: EdgeDst
    buffer_id: str


@dataclass
class ViewGroup:
    instance_id: str
    slots: list[str] = field(default_factory=list)  # edge ids, ordered by input index


def buffer_id_for(src: EdgeSrc) -> str:
    if src.is_self:
        return f"{src.instance_id}:self"
    return f"{src.instance_id}:out{src.output_index}"


class Tsg:
    def __init__(self, document: TsgDocument, registry: NodeRegistry):
        self.document = document
        self.registry = registry
        self.nodes: dict[str, NodeInstance] = {}
        self.edges: list[Edge] = []
        self.views: dict[str, ViewGroup] = {}
        self.revision = 0
        # instance id -> (statement index, element index or None)
        self._decl_sites: dict[str, tuple[int, int | None]] = {}

    # introspection

    def node(self, instance_id: str) -> NodeInstance:
        try:
            return self.nodes[instance_id]
        except KeyError:
            raise BuildError(f"unknown node {instance_id!r}") from None

    def spec_for(self, instance: NodeInstance) -> NodeClassSpec:
        spec = self.registry.lookup(instance.class_name)
        if spec is None:
            raise BuildError(f"unknown node class {instance.class_name!r}")
        return spec

    def edges_from(self, instance_id: str, output_index: int | None = None) -> list[Edge]:
        return [e for e in self.edges
                if e.src.instance_id == instance_id
                and (output_index is None or e.src.output_index == output_index)]

    def edges_into(self, instance_id: str) -> list[Edge]:
        return [e for e in self.edges if e.dst.instance_id == instance_id]

    def input_edges(self, instance_id: str) -> list[Edge]:
        return [e for e in self.edges_into(instance_id) if e.dst.kind is PortKind.INPUT]

    def config_edges(self, instance_id: str) -> list[Edge]:
        return [e for e in self.edges_into(instance_id) if e.dst.kind is PortKind.CONFIG]

    def static_config(self, instance_id: str, index: int) -> ConfigValue | None:
        """1-based static config slot, None when absent."""
        configs = self.node(instance_id).configs
        if 1 <= index <= len(configs):
            return configs[index - 1]
        return None

    # mutation

    def _ensure_view_slot(self, edge: Edge) -> None:
        dst = self.nodes[edge.dst.instance_id]
        if dst.class_name != VIEW_CLASS or edge.dst.kind is not PortKind.INPUT:
            return
        group = self.views.setdefault(dst.instance_id, ViewGroup(dst.instance_id))

        def slot_key(edge_id: str) -> tuple[int, int]:
            e = next(e for e in self.edges if e.edge_id == edge_id)
            order = next(i for i, x in enumerate(self.edges) if x.edge_id == edge_id)
            return (e.dst.index, order)

        group.slots.append(edge.edge_id)
        group.slots.sort(key=slot_key)

    def _append_edge(self, src: EdgeSrc, dst: EdgeDst) -> Edge:
        edge = Edge(f"e{len(self.edges)}", src, dst, buffer_id_for(src))
        self.edges.append(edge)
        self._ensure_view_slot(edge)
        return edge


def build_graph(document: TsgDocument, registry: NodeRegistry) -> Tsg:
    tsg = Tsg(document, registry)
    names = declared_names(document)
    counters: dict[str, int] = {}
    decl_ids: dict[int, str] = {}

    def add_instance(instance_id: str, class_name: str,
                     args: tuple[ConfigValue, ...], site: tuple[int, int | None]) -> None:
        if instance_id in tsg.nodes:
            raise BuildError(f"duplicate instance name {instance_id!r}")
        tsg.nodes[instance_id] = NodeInstance(instance_id, class_name, list(args))
        tsg._decl_sites[instance_id] = site

    def instantiate(decl: NodeDecl, site: tuple[int, int | None]) -> str:
        if decl.name is not None:
            instance_id = decl.name
        else:
            n = counters.get(decl.class_name, 0) + 1
            while f"{decl.class_name}-{n}" in names or f"{decl.class_name}-{n}" in tsg.nodes:
                n += 1
            counters[decl.class_name] = n
            instance_id = f"{decl.class_name}-{n}"
        add_instance(instance_id, decl.class_name, decl.args, site)
        decl_ids[id(decl)] = instance_id
        return instance_id

    for si, stmt in enumerate(tsg.document.statements):
        if isinstance(stmt, NodeDecl):
            instantiate(stmt, (si, None))
            continue
        for ei, element in enumerate(stmt.elements):
            if isinstance(element.target, NodeDecl):
                instantiate(element.target, (si, ei))
            elif element.target not in names and element.target not in tsg.nodes:
                add_instance(element.target, VIEW_CLASS, (), (si, ei))

    def resolve(element: Endpoint) -> str:
        if isinstance(element.target, NodeDecl):
            return decl_ids[id(element.target)]
        return element.target

    for stmt in tsg.document.statements:
        if not isinstance(stmt, LinkChain):
            continue
        for left, op, right in stmt.links():
            left_id = resolve(left)
            right_id = resolve(right)
            right_ports = right.pre_ports if right.pre_ports is not None else _IMPLICIT_IN
            if op == SELF_ARROW:
                if tsg.nodes[right_id].class_name != VIEW_CLASS:
                    raise BuildError(
                        f"node-self link target {right_id!r} is not a View")
                for port in right_ports:
                    tsg._append_edge(EdgeSrc(left_id, None),
                                     EdgeDst(right_id, PortKind.INPUT, port.index))
            else:
                left_ports = left.post_ports if left.post_ports is not None else _IMPLICIT_OUT
                for lp, rp in zip(left_ports, right_ports):
                    tsg._append_edge(EdgeSrc(left_id, lp.index),
                                     EdgeDst(right_id, rp.kind, rp.index))
    return tsg


def add_edge(tsg: Tsg, src: EdgeSrc, dst: EdgeDst) -> Edge:
    src_node = tsg.node(src.instance_id)
    dst_node = tsg.node(dst.instance_id)
    src_spec = tsg.spec_for(src_node)
    dst_spec = tsg.spec_for(dst_node)
    if src.is_self:
        if dst_node.class_name != VIEW_CLASS:
            raise BuildError(f"node-self link target {dst.instance_id!r} is not a View")
        if dst.kind is not PortKind.INPUT:
            raise BuildError("node-self link must target an input slot")
    else:
        if src.output_index < 0 or (not src_spec.variadic_outputs
                                     and src.output_index >= len(src_spec.outputs)):
            raise BuildError(
                f"output {src.output_index} out of range for {src_node.class_name}")
    if dst.kind is PortKind.INPUT:
        if dst.index < 0 or (not dst_spec.variadic_inputs and dst.index >= len(dst_spec.inputs)):
            raise BuildError(f"input {dst.index} out of range for {dst_node.class_name}")
    elif dst.kind is PortKind.CONFIG:
        if dst.index < 1 or (not dst_spec.variadic_configs and dst.index > len(dst_spec.configs)):
            raise BuildError(f"config {dst.index} out of range for {dst_node.class_name}")
    else:
        raise BuildError("edge destination must be an input or config slot")

    edge = tsg._append_edge(src, dst)
    if src.is_self:
        stmt = LinkChain(
            (Endpoint(src.instance_id),
             Endpoint(dst.instance_id, (PortRef(PortKind.INPUT, dst.index),))),
            (SELF_ARROW,))
    else:
        stmt = LinkChain(
            (Endpoint(src.instance_id, None, (PortRef(PortKind.OUTPUT, src.output_index),)),
             Endpoint(dst.instance_id, (PortRef(dst.kind, dst.index),))),
            (ARROW,))
    tsg.document = replace(tsg.document, statements=tsg.document.statements + (stmt,))
    tsg.revision += 1
    return edge


def set_config_value(tsg: Tsg, instance_id: str, index: int, value: ConfigValue | str) -> None:
    node = tsg.node(instance_id)
    if node.state is NodeState.TERMINATED:
        raise BuildError(f"node {instance_id!r} is terminated")
    if isinstance(value, str):
        value = _as_config_value(value)
    spec = tsg.spec_for(node)
    if index < 1 or (not spec.variadic_configs and index > len(spec.configs)):
        raise BuildError(f"config {index} out of range for {node.class_name}")
    while len(node.configs) < index:
        node.configs.append(NIL)
    node.configs[index - 1] = value

    si, ei = tsg._decl_sites[instance_id]
    stmts = list(tsg.document.statements)
    if ei is None:
        decl = stmts[si]
        stmts[si] = replace(decl, args=tuple(node.configs))
    else:
        chain = stmts[si]
        elements = list(chain.elements)
        element = elements[ei]
        decl = element.target
        if isinstance(decl, NodeDecl):
            elements[ei] = replace(element, target=replace(decl, args=tuple(node.configs)))
            stmts[si] = replace(chain, elements=tuple(elements))
        else:
            raise BuildError(f"node {instance_id!r} has no declaration to rewrite")
    tsg.document = replace(tsg.document, statements=tuple(stmts))
    tsg.revision += 1


def _as_config_value(text: str) -> ConfigValue:
    if text == "nil":
        return NIL
    if text.isdigit():
        return ConfigValue(ConfigKind.INTEGER, text)
    return ConfigValue(ConfigKind.BARE, text)


def neighbors(tsg: Tsg, instance_id: str, direction: str) -> list[str]:
    """Adjacent instance ids; forward follows outputs, backward inputs."""
    tsg.node(instance_id)
    if direction == "forward":
        ranked = sorted(
            ((e.src.output_index if not e.src.is_self else -1, i, e.dst.instance_id)
             for i, e in enumerate(tsg.edges) if e.src.instance_id == instance_id))
    elif direction == "backward":
        ranked = sorted(
            ((e.dst.index, i, e.src.instance_id)
             for i, e in enumerate(tsg.edges) if e.dst.instance_id == instance_id))
    else:
        raise ValueError(f"direction must be forward or backward, not {direction!r}")
    out: list[str] = []
    for _, _, node_id in ranked:
        if node_id not in out:
            out.append(node_id)
    return out


_EDGE_STYLE = {PortKind.INPUT: "solid", PortKind.CONFIG: "dashed"}


def export_dot(tsg: Tsg) -> str:
    lines = ["digraph tsg {"]
    for node in tsg.nodes.values():
        lines.append(f'  "{node.instance_id}" [label="{node.instance_id} : {node.class_name}"];')
    for edge in tsg.edges:
        if edge.src.is_self:
            style = "dotted"
            tail = "self"
        else:
            style = _EDGE_STYLE[edge.dst.kind]
            tail = f"out{edge.src.output_index}"
        head = f"-{edge.dst.index}" if edge.dst.kind is PortKind.CONFIG else str(edge.dst.index)
        lines.append(
            f'  "{edge.src.instance_id}" -> "{edge.dst.instance_id}" '
            f'[style={style} taillabel="{tail}" headlabel="{head}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


_DECISION_CLASSES = {"Decision", "Decision-summary"}


def semantic_groups(tsg: Tsg) -> dict[str, list[str]]:
    nodes = list(tsg.nodes)
    outputs = []
    for node in tsg.nodes.values():
        spec = tsg.registry.lookup(node.class_name)
        if spec is None:
            continue
        outputs.extend(f"{node.instance_id}:out{i}" for i in range(len(spec.outputs)))
    views = [n.instance_id for n in tsg.nodes.values() if n.class_name == VIEW_CLASS]
    decisions = [n.instance_id for n in tsg.nodes.values()
                 if n.class_name in _DECISION_CLASSES]
    return {"nodes": nodes, "outputs": outputs, "views": views, "decisions": decisions}


def save_document(document: TsgDocument, path: str) -> int:
    """Atomic write: temp file in the target directory, then rename."""
    text = serialize_document(document)
    data = text.encode("utf-8")
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tsg-commit-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    return len(data)
