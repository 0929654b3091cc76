"""Event-queue execution engine.

Propagation follows the change queue: each time an output buffer gains a
record, every node holding that buffer as an input is appended to the
queue; the scheduler pops from the front and runs one node at a time.
Config links never enqueue, they are snapshotted right before a node
executes.  With a virtual clock the whole run is a deterministic
function of the document, the registry, and the tick schedule.
"""
from __future__ import annotations

import enum
import json
import queue as queue_mod
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .graph import Edge, NodeInstance, NodeState, Tsg, buffer_id_for
from .lang.ast import ConfigKind, ConfigValue, PortKind

ORIGIN_NODE = "node"
ORIGIN_INJECTED = "injected"

DEFAULT_PROPAGATION_BUDGET = 10_000


@dataclass(frozen=True)
class BufferRecord:
    seq: int
    timestamp: float
    origin: str
    text: str


class Buffer:
    """Append-only record stream for one node output (or the node itself)."""

    def __init__(self, buffer_id: str):
        self.buffer_id = buffer_id
        self.records: list[BufferRecord] = []

    def append(self, text: str, origin: str, timestamp: float) -> BufferRecord:
        record = BufferRecord(len(self.records), timestamp, origin, text)
        self.records.append(record)
        return record

    def __len__(self) -> int:
        return len(self.records)

    def text_range(self, start: int, end: int) -> str:
        return "".join(r.text for r in self.records[start:end])

    def latest(self) -> BufferRecord | None:
        return self.records[-1] if self.records else None


@dataclass(frozen=True)
class Cursor:
    buffer_id: str
    next_seq: int = 0


class EventKind(str, enum.Enum):
    LIFECYCLE = "lifecycle"
    TIMER_TICK = "timer-tick"
    OUTPUT_CHANGED = "output-changed"
    INJECTED = "injected"
    NODE_EXECUTED = "node-executed"
    NODE_ERROR = "node-error"


@dataclass(frozen=True)
class EngineEvent:
    seq: int
    kind: EventKind
    timestamp: float
    node_id: str | None = None
    buffer_id: str | None = None
    range_start: int | None = None
    range_end: int | None = None
    detail: str | None = None

    def to_dict(self) -> dict:
        out = {"seq": self.seq, "kind": self.kind.value, "timestamp": self.timestamp}
        for key in ("node_id", "buffer_id", "range_start", "range_end", "detail"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


@dataclass
class EngineReport:
    events: tuple[EngineEvent, ...]
    buffer_lengths: dict[str, int]


class VirtualClock:
    """Time only moves when the engine advances it."""

    def __init__(self, start: float = 0.0):
        self.time = float(start)

    def now(self) -> float:
        return self.time

    @property
    def virtual(self) -> bool:
        return True


class WallClock:
    def now(self) -> float:
        return time.time()

    @property
    def virtual(self) -> bool:
        return False


@dataclass
class _Timer:
    node_id: str
    period: float
    next_fire: float


class NodeContext:
    """Per-execution window a node behavior sees of the engine."""

    def __init__(self, engine: "Engine", instance: NodeInstance):
        self._engine = engine
        self._instance = instance

    @property
    def instance_id(self) -> str:
        return self._instance.instance_id

    @property
    def class_name(self) -> str:
        return self._instance.class_name

    @property
    def private(self) -> dict:
        return self._instance.private

    @property
    def tsg(self) -> Tsg:
        return self._engine.tsg

    @property
    def stub_dir(self) -> str | None:
        return self._engine.stub_dir

    @property
    def engine(self) -> "Engine":
        return self._engine

    def clock_now(self) -> float:
        return self._engine.clock.now()

    # configuration

    def config_value(self, index: int) -> ConfigValue | None:
        dynamic = self._instance.dynamic_configs.get(index)
        if dynamic is not None:
            return ConfigValue(ConfigKind.BARE, dynamic)
        return self._engine.tsg.static_config(self.instance_id, index)

    def config_text(self, index: int) -> str | None:
        value = self.config_value(index)
        if value is None:
            return None
        return value.as_text()

    # inputs

    def input_edges(self, index: int | None = None) -> list[Edge]:
        edges = self._engine.tsg.input_edges(self.instance_id)
        if index is None:
            return edges
        return [e for e in edges if e.dst.index == index]

    def input_indices(self) -> list[int]:
        return sorted({e.dst.index for e in self.input_edges()})

    def has_news(self, index: int | None = None) -> bool:
        return any(
            self._engine.cursor_position(e.edge_id) < len(self._engine.buffer(e.buffer_id))
            for e in self.input_edges(index))

    def read_input(self, index: int) -> str:
        """Delta text of input slot `index` since the last read; advances cursors."""
        parts = []
        for edge in self.input_edges(index):
            parts.append(self._engine.consume_edge(edge.edge_id))
        return "".join(parts)

    def latest_input_record(self, index: int) -> str | None:
        latest: BufferRecord | None = None
        for edge in self.input_edges(index):
            record = self._engine.buffer(edge.buffer_id).latest()
            if record is not None and (latest is None or record.timestamp >= latest.timestamp):
                latest = record
        return latest.text if latest else None

    # outputs

    def write(self, output_index: int, text: str) -> None:
        self._engine.node_write(self._instance, output_index, text)

    def write_self(self, text: str) -> None:
        self._engine.node_write_self(self._instance, text)

    # timers and processes

    def register_timer(self, period: float) -> None:
        self._engine.register_timer(self.instance_id, period)

    def track_process(self, process) -> None:
        self._engine.track_process(self.instance_id, process)

    def post(self, fn: Callable[[], None]) -> None:
        self._engine.post(fn)


class Engine:
    def __init__(self, tsg: Tsg, clock: VirtualClock | WallClock | None = None,
                 stub_dir: str | None = None,
                 propagation_budget: int = DEFAULT_PROPAGATION_BUDGET,
                 coalesce: bool = False,
                 transports: dict | None = None):
        self.tsg = tsg
        self.clock = clock if clock is not None else VirtualClock()
        self.stub_dir = stub_dir
        self.propagation_budget = propagation_budget
        self.coalesce = coalesce
        self.transports = transports or {}
        self.buffers: dict[str, Buffer] = {}
        self.cursors: dict[str, Cursor] = {}
        self.queue: deque[str] = deque()
        self.events: list[EngineEvent] = []
        self.timers: list[_Timer] = []
        self.processes: dict[str, list] = {}
        self.started = False
        self.stopped = False
        self._report: EngineReport | None = None
        self._init_order: list[str] = []
        self._subscribers: list[queue_mod.Queue] = []
        self._commands: queue_mod.Queue = queue_mod.Queue()
        self._loop_thread: threading.Thread | None = None
        self._stop_loop = threading.Event()

    # event log

    def _emit(self, kind: EventKind, **fields) -> EngineEvent:
        event = EngineEvent(len(self.events), kind, self.clock.now(), **fields)
        self.events.append(event)
        for sub in list(self._subscribers):
            try:
                sub.put_nowait(event)
            except queue_mod.Full:
                self._subscribers.remove(sub)
                try:
                    sub.put_nowait(None)  # lagged marker, stream closes
                except queue_mod.Full:
                    pass
        return event

    def subscribe(self, maxsize: int = 1000) -> queue_mod.Queue:
        sub: queue_mod.Queue = queue_mod.Queue(maxsize=maxsize)
        self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: queue_mod.Queue) -> None:
        if sub in self._subscribers:
            self._subscribers.remove(sub)

    def export_jsonl(self) -> str:
        return "\n".join(e.to_json() for e in self.events) + ("\n" if self.events else "")

    # buffers and cursors

    def buffer(self, buffer_id: str) -> Buffer:
        return self.buffers[buffer_id]

    def ensure_buffer(self, buffer_id: str) -> Buffer:
        if buffer_id not in self.buffers:
            self.buffers[buffer_id] = Buffer(buffer_id)
        return self.buffers[buffer_id]

    def cursor_position(self, edge_id: str) -> int:
        cursor = self.cursors.get(edge_id)
        return cursor.next_seq if cursor else 0

    def context_for(self, instance_id: str) -> NodeContext:
        return NodeContext(self, self.tsg.node(instance_id))

    def consume_edge(self, edge_id: str) -> str:
        edge = next(e for e in self.tsg.edges if e.edge_id == edge_id)
        cursor = self.cursors.get(edge_id, Cursor(edge.buffer_id))
        text, advanced = self.read_delta(cursor)
        self.cursors[edge_id] = advanced
        return text

    def read_delta(self, cursor: Cursor) -> tuple[str, Cursor]:
        buf = self.ensure_buffer(cursor.buffer_id)
        end = len(buf)
        text = buf.text_range(cursor.next_seq, end)
        return text, Cursor(cursor.buffer_id, end)

    # lifecycle

    def start(self) -> None:
        if self.started:
            return
        self.started = True
        self._emit(EventKind.LIFECYCLE, detail="start")
        for node in self.tsg.nodes.values():
            spec = self.tsg.spec_for(node)
            for i in range(len(spec.outputs)):
                self.ensure_buffer(f"{node.instance_id}:out{i}")
        for edge in self.tsg.edges:
            self.ensure_buffer(edge.buffer_id)
        for node in self.tsg.nodes.values():
            spec = self.tsg.spec_for(node)
            ctx = NodeContext(self, node)
            try:
                spec.init(ctx)
            except Exception as err:
                self._emit(EventKind.NODE_ERROR, node_id=node.instance_id,
                           detail=f"init failed: {err}")
                continue
            node.advance_state(NodeState.INITIALIZED)
            self._init_order.append(node.instance_id)
            self._emit(EventKind.LIFECYCLE, node_id=node.instance_id, detail="init")
        for node in self.tsg.nodes.values():
            spec = self.tsg.spec_for(node)
            if spec.autostart and node.state is NodeState.INITIALIZED \
                    and not self.tsg.input_edges(node.instance_id):
                self.queue.append(node.instance_id)
        self.drain()

    def stop(self) -> EngineReport:
        if self._report is not None:
            return self._report
        self.stopped = True
        for procs in self.processes.values():
            for proc in procs:
                if proc.poll() is None:
                    proc.kill()
        for node_id in reversed(self._init_order):
            node = self.tsg.nodes[node_id]
            if node.state is NodeState.TERMINATED:
                continue
            spec = self.tsg.spec_for(node)
            try:
                spec.term(NodeContext(self, node))
            except Exception as err:
                self._emit(EventKind.NODE_ERROR, node_id=node_id,
                           detail=f"term failed: {err}")
            node.advance_state(NodeState.TERMINATED)
            self._emit(EventKind.LIFECYCLE, node_id=node_id, detail="term")
        self._emit(EventKind.LIFECYCLE, detail="stop")
        self._report = EngineReport(
            tuple(self.events),
            {bid: len(buf) for bid, buf in self.buffers.items()},
        )
        return self._report

    # writes and propagation

    def node_write(self, instance: NodeInstance, output_index: int, text: str) -> None:
        spec = self.tsg.spec_for(instance)
        if output_index < 0 or (not spec.variadic_outputs
                                and output_index >= len(spec.outputs)):
            raise RuntimeError(
                f"{instance.instance_id} has no output {output_index}")
        buffer_id = f"{instance.instance_id}:out{output_index}"
        self._append_and_notify(buffer_id, text, ORIGIN_NODE)

    def node_write_self(self, instance: NodeInstance, text: str) -> None:
        buffer_id = f"{instance.instance_id}:self"
        if not any(e.src.is_self and e.src.instance_id == instance.instance_id
                   for e in self.tsg.edges):
            return
        self._append_and_notify(buffer_id, text, ORIGIN_NODE)

    def _append_and_notify(self, buffer_id: str, text: str, origin: str) -> int:
        buf = self.ensure_buffer(buffer_id)
        record = buf.append(text, origin, self.clock.now())
        self.notify_output_changed(buffer_id, record.seq, record.seq + 1)
        return record.seq

    def notify_output_changed(self, buffer_id: str, start: int, end: int) -> None:
        self._emit(EventKind.OUTPUT_CHANGED, buffer_id=buffer_id,
                   range_start=start, range_end=end)
        for edge in self.tsg.edges:
            if edge.buffer_id != buffer_id or edge.dst.kind is not PortKind.INPUT:
                continue
            if self.coalesce and edge.dst.instance_id in self.queue:
                continue
            self.queue.append(edge.dst.instance_id)

    def inject(self, buffer_id: str, text: str, drain: bool = True) -> int:
        if buffer_id not in self.buffers:
            raise KeyError(f"unknown buffer {buffer_id!r}")
        buf = self.buffers[buffer_id]
        record = buf.append(text, ORIGIN_INJECTED, self.clock.now())
        self._emit(EventKind.INJECTED, buffer_id=buffer_id, range_start=record.seq,
                   range_end=record.seq + 1)
        self.notify_output_changed(buffer_id, record.seq, record.seq + 1)
        if drain:
            self.drain()
        return record.seq

    # scheduling

    def step(self) -> EngineEvent | None:
        if not self.queue:
            return None
        node_id = self.queue.popleft()
        return self._execute(node_id)

    def _execute(self, node_id: str) -> EngineEvent | None:
        instance = self.tsg.nodes.get(node_id)
        if instance is None or instance.state in (NodeState.CREATED, NodeState.TERMINATED):
            return None
        for edge in self.tsg.config_edges(node_id):
            buf = self.buffers.get(edge.buffer_id)
            latest = buf.latest() if buf else None
            if latest is not None:
                instance.dynamic_configs[edge.dst.index] = latest.text
        if instance.state is NodeState.INITIALIZED:
            instance.advance_state(NodeState.RUNNING)
        spec = self.tsg.spec_for(instance)
        ctx = NodeContext(self, instance)
        try:
            spec.exec(ctx)
        except Exception as err:
            return self._emit(EventKind.NODE_ERROR, node_id=node_id, detail=str(err))
        return self._emit(EventKind.NODE_EXECUTED, node_id=node_id)

    def drain(self) -> None:
        executed = 0
        while self.queue:
            if executed >= self.propagation_budget:
                pending = self.queue.popleft()
                self.queue.clear()
                self._emit(EventKind.NODE_ERROR, node_id=pending,
                           detail="propagation budget exceeded")
                return
            self.step()
            executed += 1

    # timers

    def register_timer(self, node_id: str, period: float) -> None:
        if period <= 0:
            raise RuntimeError(f"{node_id}: timer period must be positive")
        self.timers.append(_Timer(node_id, float(period), self.clock.now()))

    def _fire_timer(self, timer: _Timer) -> None:
        self._emit(EventKind.TIMER_TICK, node_id=timer.node_id)
        timer.next_fire += timer.period
        self.queue.append(timer.node_id)
        self.drain()

    def advance_to(self, instant: float) -> None:
        """Move virtual time forward, firing due timers in time order."""
        if not self.clock.virtual:
            raise RuntimeError("advance_to requires a virtual clock")
        while True:
            due = [t for t in self.timers if t.next_fire <= instant]
            if not due:
                break
            timer = min(due, key=lambda t: (t.next_fire, self.timers.index(t)))
            self.clock.time = timer.next_fire
            self._fire_timer(timer)
        if instant > self.clock.now():
            self.clock.time = instant

    def run_schedule(self, instants: Iterable[float]) -> None:
        for instant in instants:
            self.advance_to(instant)

    def run_for(self, seconds: float, poll: float = 0.02) -> None:
        """Wall-clock run: fire timers and serve posted commands for a while."""
        deadline = time.time() + seconds
        while time.time() < deadline:
            self._pump_once(poll)

    def _pump_once(self, poll: float) -> None:
        now = self.clock.now()
        due = [t for t in self.timers if t.next_fire <= now]
        for timer in sorted(due, key=lambda t: (t.next_fire, self.timers.index(t))):
            self._fire_timer(timer)
        try:
            fn = self._commands.get(timeout=poll)
        except queue_mod.Empty:
            return
        fn()
        self.drain()

    # command funnel (thread-safe entry for servers and tool readers)

    def post(self, fn: Callable[[], None]) -> None:
        if self._loop_thread and self._loop_thread.is_alive():
            self._commands.put(fn)
        else:
            fn()
            self.drain()

    def submit(self, fn: Callable[[], object]) -> object:
        if not (self._loop_thread and self._loop_thread.is_alive()):
            result = fn()
            self.drain()
            return result
        done = threading.Event()
        box: dict = {}

        def run() -> None:
            try:
                box["value"] = fn()
            except Exception as err:
                box["error"] = err
            finally:
                done.set()

        self._commands.put(run)
        done.wait()
        if "error" in box:
            raise box["error"]
        return box.get("value")

    def start_loop(self) -> None:
        if self._loop_thread and self._loop_thread.is_alive():
            return
        self._stop_loop.clear()

        def loop() -> None:
            while not self._stop_loop.is_set():
                self._pump_once(0.05)

        self._loop_thread = threading.Thread(target=loop, name="tsg-engine", daemon=True)
        self._loop_thread.start()

    def stop_loop(self) -> None:
        self._stop_loop.set()
        if self._loop_thread:
            self._loop_thread.join(timeout=2)
            self._loop_thread = None

    def track_process(self, node_id: str, process) -> None:
        self.processes.setdefault(node_id, []).append(process)


def start_engine(tsg: Tsg, clock: VirtualClock | WallClock | None = None,
                 **kwargs) -> Engine:
    engine = Engine(tsg, clock, **kwargs)
    engine.start()
    return engine


def stop_engine(engine: Engine) -> EngineReport:
    return engine.stop()
