"""Operator entry point: run, check, dot, serve, recommend.

Exit codes are stable for scripting: 0 clean, 1 parse or build failure,
2 runtime trouble (node errors, unknown dump target, bad listen
address).  Diagnostics go to stderr; stdout carries only data.
"""
from __future__ import annotations

import signal
import socket
import sys
from pathlib import Path

import click

from .api import create_app
from .engine import Engine, EventKind, VirtualClock, WallClock, stop_engine
from .graph import BuildError, build_graph, export_dot
from .lang import ParseError, Severity, parse_document, validate_document
from .nodes import build_default_registry
from .recommend import index_repository, recommend_nodes, repository_files

SUMMARY_CLASS = "Decision-summary"


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    try:
        document = parse_document(text, path)
        return build_graph(document, build_default_registry())
    except (ParseError, BuildError) as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)


def _parse_listen(listen: str) -> tuple[str, int]:
    host, sep, port = listen.rpartition(":")
    if not sep or not port.isdigit():
        raise click.UsageError(f"listen address must be host:port, not {listen!r}")
    return host or "127.0.0.1", int(port)


@click.group()
def cli() -> None:
    """Troubleshooting-graph toolkit."""


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--stub-dir", type=click.Path(exists=True, file_okay=False),
              help="Replay recorded tool transcripts instead of spawning tools.")
@click.option("--virtual-clock", "schedule", metavar="T0,T1,...",
              help="Drive timers through these virtual instants, then stop.")
@click.option("--duration", type=float,
              help="Run on the wall clock for this many seconds.")
@click.option("--dump", "dumps", multiple=True, metavar="NODE",
              help="Print the output buffers of NODE after the run.")
def run(file: str, stub_dir: str | None, schedule: str | None,
        duration: float | None, dumps: tuple[str, ...]) -> None:
    """Build FILE, execute it, and print dumps and decision summaries."""
    tsg = _load(file)
    clock = WallClock() if duration is not None and schedule is None else VirtualClock()
    engine = Engine(tsg, clock, stub_dir=stub_dir)
    engine.start()
    if schedule is not None:
        try:
            instants = [float(part) for part in schedule.split(",") if part.strip()]
        except ValueError:
            raise click.UsageError(f"bad tick schedule {schedule!r}")
        engine.run_schedule(instants)
    elif duration is not None:
        engine.run_for(duration)

    status = 0
    for node_id in dumps:
        if node_id not in tsg.nodes:
            click.echo(f"error: no node {node_id!r} to dump", err=True)
            status = 2
            continue
        for buffer_id in sorted(b for b in engine.buffers if b.startswith(f"{node_id}:")):
            click.echo(f"== {buffer_id} ==")
            click.echo(engine.buffers[buffer_id].text_range(0, len(engine.buffers[buffer_id])), nl=False)
    for node in tsg.nodes.values():
        if node.class_name != SUMMARY_CLASS:
            continue
        latest = engine.buffers[f"{node.instance_id}:out0"].latest()
        if latest is not None:
            click.echo(latest.text, nl=False)
    report = stop_engine(engine)
    if any(e.kind is EventKind.NODE_ERROR for e in report.events):
        status = max(status, 2)
    sys.exit(status)


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
def check(file: str) -> None:
    """Parse and validate FILE, printing diagnostics."""
    try:
        document = parse_document(Path(file).read_text(encoding="utf-8"), file)
    except ParseError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    diagnostics = validate_document(document, build_default_registry())
    for diagnostic in diagnostics:
        click.echo(str(diagnostic), err=True)
    sys.exit(1 if any(d.severity is Severity.ERROR for d in diagnostics) else 0)


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
def dot(file: str) -> None:
    """Print FILE's graph as DOT for automatic layout."""
    click.echo(export_dot(_load(file)), nl=False)


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--listen", default="127.0.0.1:8420", show_default=True,
              help="host:port for the control API.")
@click.option("--stub-dir", type=click.Path(exists=True, file_okay=False),
              help="Replay recorded tool transcripts instead of spawning tools.")
def serve(file: str, listen: str, stub_dir: str | None) -> None:
    """Run FILE under a wall clock and expose the control API."""
    import uvicorn

    host, port = _parse_listen(listen)
    tsg = _load(file)
    engine = Engine(tsg, WallClock(), stub_dir=stub_dir)
    engine.start()
    engine.start_loop()
    app = create_app(engine)
    try:
        sock = socket.create_server((host, port))
    except OSError as err:
        click.echo(f"error: cannot listen on {listen}: {err}", err=True)
        engine.stop_loop()
        stop_engine(engine)
        sys.exit(2)
    bound_host, bound_port = sock.getsockname()[:2]
    click.echo(f"listening on http://{bound_host}:{bound_port}")
    server = uvicorn.Server(uvicorn.Config(app, fd=sock.fileno(), log_level="warning"))
    # uvicorn re-raises the shutdown signal after restoring handlers; a
    # no-op handler keeps the re-raise from killing us before cleanup.
    signal.signal(signal.SIGTERM, lambda signum, frame: None)
    try:
        server.run()
    except KeyboardInterrupt:
        pass
    finally:
        sock.close()
        engine.stop_loop()
        stop_engine(engine)


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--repo", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory tree of .tsg files to learn from.")
@click.option("-k", default=5, show_default=True, type=click.IntRange(min=1),
              help="Maximum number of suggestions.")
def recommend(file: str, repo: str, k: int) -> None:
    """Suggest popular node classes FILE does not use yet."""
    tsg = _load(file)
    index = index_repository(repository_files(repo))
    for class_name, count in recommend_nodes(index, tsg, k):
        click.echo(f"{class_name} {count}")


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
