"""HTTP surface over a running engine.

Read endpoints snapshot engine state; every mutation goes through
engine.submit so requests never interleave with node execution.  The
event stream is server-sent events, one JSON object per message, in
engine log order.  All paths live under /api/v1.
"""
from __future__ import annotations

import queue as queue_mod
from typing import Iterator

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .engine import Engine, EngineEvent
from .graph import BuildError, EdgeDst, EdgeSrc, PortKind, add_edge, save_document, set_config_value

PAGE_LIMIT = 1000


class InjectBody(BaseModel):
    buffer_id: str
    text: str


class EdgeBody(BaseModel):
    src_node: str
    src_output: int | None = 0  # None links the node itself, View targets only
    dst_node: str
    dst_kind: str = "input"
    dst_index: int = 0


class ConfigBody(BaseModel):
    node: str
    index: int
    value: str


class CommitBody(BaseModel):
    path: str | None = None


def _topology(engine: Engine) -> dict:
    tsg = engine.tsg
    nodes = []
    for node in tsg.nodes.values():
        spec = tsg.spec_for(node)
        nodes.append(
            {
                "id": node.instance_id,
                "class": node.class_name,
                "state": node.state.value,
                "doc": spec.doc,
                "configs": [value.as_text() for value in node.configs],
                "inputs": [{"name": p.name, "doc": p.doc} for p in spec.inputs],
                "outputs": [{"name": p.name, "doc": p.doc} for p in spec.outputs],
                "config_slots": [
                    {"name": c.name, "doc": c.doc, "required": c.required}
                    for c in spec.configs
                ],
            }
        )
    edges = []
    for edge in tsg.edges:
        edges.append(
            {
                "id": edge.edge_id,
                "src": {
                    "node": edge.src.instance_id,
                    "output": None if edge.src.is_self else edge.src.output_index,
                },
                "dst": {
                    "node": edge.dst.instance_id,
                    "kind": edge.dst.kind.value,
                    "index": edge.dst.index,
                },
                "buffer_id": edge.buffer_id,
            }
        )
    views = [
        {"id": group.instance_id, "slots": list(group.slots)}
        for group in tsg.views.values()
    ]
    return {"revision": tsg.revision, "nodes": nodes, "edges": edges, "views": views}


def create_app(engine: Engine | None = None) -> FastAPI:
    app = FastAPI(title="tsgraph control api")
    # The operator console is served from wherever; the API carries no
    # credentials, so a wildcard origin is fine.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.engine = engine

    def attached(request: Request) -> Engine:
        running: Engine | None = request.app.state.engine
        if running is None:
            raise HTTPException(status_code=503, detail="no engine attached")
        return running

    @app.get("/api/v1/topology")
    def get_topology(request: Request) -> dict:
        running = attached(request)
        return running.submit(lambda: _topology(running))

    @app.get("/api/v1/buffers/{buffer_id}")
    def get_buffer_page(
        request: Request, buffer_id: str, from_seq: int = 0, limit: int = 100
    ) -> dict:
        running = attached(request)
        if buffer_id not in running.buffers:
            raise HTTPException(status_code=404, detail=f"unknown buffer {buffer_id!r}")
        limit = max(0, min(limit, PAGE_LIMIT))
        buf = running.buffers[buffer_id]
        page = buf.records[max(from_seq, 0):max(from_seq, 0) + limit]
        return {
            "buffer_id": buffer_id,
            "records": [
                {
                    "seq": r.seq,
                    "timestamp": r.timestamp,
                    "origin": r.origin,
                    "text": r.text,
                }
                for r in page
            ],
            "next_seq": (page[-1].seq + 1) if page else max(from_seq, 0),
            "total": len(buf),
        }

    @app.get("/api/v1/events")
    def stream_events(
        request: Request,
        from_seq: int = 0,
        node_id: str | None = None,
        kind: str | None = None,
        live: bool = True,
        max_events: int | None = None,
        keepalive: float = 15.0,
    ) -> StreamingResponse:
        """Replays the log from from_seq, then pushes new events as they occur.

        live=false closes after the replay; max_events closes after that
        many matched events.  Both exist so bounded clients can catch up
        without holding a connection open.
        """
        running = attached(request)
        sub = running.subscribe() if live else None

        def matches(event: EngineEvent) -> bool:
            if node_id is not None and event.node_id != node_id:
                return False
            if kind is not None and event.kind.value != kind:
                return False
            return True

        def stream() -> Iterator[str]:
            sent = 0
            last_seq = from_seq - 1
            try:
                for event in list(running.events):
                    if event.seq <= last_seq or not matches(event):
                        continue
                    last_seq = event.seq
                    yield f"data: {event.to_json()}\n\n"
                    sent += 1
                    if max_events is not None and sent >= max_events:
                        return
                while sub is not None:
                    try:
                        event = sub.get(timeout=keepalive)
                    except queue_mod.Empty:
                        yield ": keep-alive\n\n"
                        continue
                    if event is None:
                        yield 'event: lagged\ndata: {"lagged": true}\n\n'
                        return
                    if event.seq <= last_seq or not matches(event):
                        continue
                    last_seq = event.seq
                    yield f"data: {event.to_json()}\n\n"
                    sent += 1
                    if max_events is not None and sent >= max_events:
                        return
            finally:
                if sub is not None:
                    running.unsubscribe(sub)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.post("/api/v1/inject")
    def post_injection(request: Request, body: InjectBody) -> dict:
        running = attached(request)
        try:
            seq = running.submit(lambda: running.inject(body.buffer_id, body.text))
        except KeyError:
            raise HTTPException(
                status_code=404, detail=f"unknown buffer {body.buffer_id!r}"
            ) from None
        return {"buffer_id": body.buffer_id, "seq": seq}

    @app.post("/api/v1/edges")
    def post_edge(request: Request, body: EdgeBody) -> dict:
        running = attached(request)
        try:
            kind = PortKind(body.dst_kind)
        except ValueError:
            raise HTTPException(
                status_code=400, detail=f"bad destination kind {body.dst_kind!r}"
            ) from None

        def apply() -> int:
            edge = add_edge(
                running.tsg,
                EdgeSrc(body.src_node, body.src_output),
                EdgeDst(body.dst_node, kind, body.dst_index),
            )
            running.ensure_buffer(edge.buffer_id)
            return running.tsg.revision

        try:
            revision = running.submit(apply)
        except BuildError as err:
            raise HTTPException(status_code=400, detail=str(err)) from None
        return {"revision": revision}

    @app.post("/api/v1/config")
    def post_config(request: Request, body: ConfigBody) -> dict:
        running = attached(request)

        def apply() -> int:
            set_config_value(running.tsg, body.node, body.index, body.value)
            return running.tsg.revision

        try:
            revision = running.submit(apply)
        except BuildError as err:
            raise HTTPException(status_code=400, detail=str(err)) from None
        return {"revision": revision}

    @app.post("/api/v1/commit")
    def commit_document(request: Request, body: CommitBody) -> dict:
        running = attached(request)
        path = body.path or running.tsg.document.source_name
        if not path or path == "<string>":
            raise HTTPException(status_code=400, detail="no document path to commit to")

        def apply() -> int:
            return save_document(running.tsg.document, path)

        try:
            written = running.submit(apply)
        except OSError as err:
            raise HTTPException(status_code=500, detail=str(err)) from None
        return {"path": path, "bytes_written": written}

    return app
