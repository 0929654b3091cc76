"""External-tool execution shared by the wrapper node classes.

A ToolSpec describes the command template, where it runs, and how the
output is treated.  Three run modes exist: stub transcripts for tests
and rehearsals, synchronous subprocess runs under a virtual clock, and
background streaming under the wall clock.
"""

from __future__ import annotations

import glob
import os
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..engine import NodeContext

_LOCAL_HOSTS = {None, "", "localhost", "127.0.0.1", "::1"}


class ToolError(Exception):
    """Raised when a tool cannot be prepared or spawned."""


@dataclass(frozen=True)
class Part:
    """One argv fragment: a literal, or a config substitution.

    A flagged part expands to [flag, value].  Optional parts vanish when
    the config slot is empty; required ones make substitution fail.
    Substituted values are trimmed to their first line, since argv slots
    hold single words.
    """

    literal: str | None = None
    config: int | None = None
    flag: str | None = None
    optional: bool = False


def lit(text: str) -> Part:
    return Part(literal=text)


def cfg(index: int, flag: str | None = None, optional: bool = False) -> Part:
    return Part(config=index, flag=flag, optional=optional)


@dataclass(frozen=True)
class ToolSpec:
    """Recipe for one wrapper class."""

    command: tuple[Part, ...]
    host_config: int | None = 1
    parse_mode: str = "raw"  # or "line-filtered"
    filter_config: int | None = None
    transform: Callable[[NodeContext, str], str] | None = None
    extractors: tuple[Callable[[NodeContext, str], None], ...] = field(default_factory=tuple)


class Transport:
    """Maps (host, argv) to the argv actually spawned."""

    def wrap(self, host: str, argv: list[str]) -> list[str]:  # pragma: no cover - interface
        raise NotImplementedError


class LocalTransport(Transport):
    def wrap(self, host: str, argv: list[str]) -> list[str]:
        return argv


class SshTransport(Transport):
    """Remote execution through a standard ssh client."""

    def wrap(self, host: str, argv: list[str]) -> list[str]:
        return ["ssh", "-o", "BatchMode=yes", host, shlex.join(argv)]


class LoopbackTransport(Transport):
    """Test transport: records the request and runs locally."""

    def __init__(self):
        self.calls: list[tuple[str, tuple[str, ...]]] = []

    def wrap(self, host: str, argv: list[str]) -> list[str]:
        self.calls.append((host, tuple(argv)))
        return argv


def default_transports() -> dict[str, Transport]:
    return {"local": LocalTransport(), "ssh": SshTransport()}


_DEFAULT_TRANSPORTS = default_transports()


def resolve_argv(ctx: NodeContext, spec: ToolSpec) -> list[str]:
    """Substitute config values into the command template.

    Substitution is total: a required part without a value is an error.
    """
    argv: list[str] = []
    for part in spec.command:
        if part.literal is not None:
            argv.append(part.literal)
            continue
        value = ctx.config_text(part.config)
        if value is not None:
            value = value.strip()
            if value:
                value = value.splitlines()[0]
        if not value:
            if part.optional:
                continue
            raise ToolError(
                f"cannot resolve command argument: config {part.config} of "
                f"{ctx.instance_id} is empty"
            )
        if part.flag is not None:
            argv.append(part.flag)
        argv.append(value)
    return argv


def stub_path(ctx: NodeContext) -> str:
    """Lexicographically first `<class>.*.txt` transcript in the stub dir."""
    pattern = os.path.join(ctx.stub_dir, f"{ctx.class_name}.*.txt")
    matches = sorted(glob.glob(pattern))
    if not matches:
        raise ToolError(
            f"no stub transcript for class '{ctx.class_name}' in {ctx.stub_dir}"
        )
    return matches[0]


def _apply_text_stages(ctx: NodeContext, spec: ToolSpec, text: str) -> str:
    if spec.parse_mode == "line-filtered" and spec.filter_config is not None:
        needle = ctx.config_text(spec.filter_config)
        if needle:
            text = filter_address_lines(text, needle)
    if spec.transform is not None:
        text = spec.transform(ctx, text)
    return text


def _relay(ctx: NodeContext, spec: ToolSpec, text: str) -> None:
    """Write tool output as line records plus an empty completion record.

    The completion record keeps concatenated bytes equal to the tool's
    output while still advancing the stream, so a tool that printed
    nothing still triggers downstream evaluation.
    """
    for line in text.splitlines(keepends=True):
        ctx.write(0, line)
    ctx.write(0, "")
    for extractor in spec.extractors:
        extractor(ctx, text)


def run_tool(ctx: NodeContext, spec: ToolSpec) -> None:
    """Run the wrapped tool once in whichever mode applies."""
    if ctx.stub_dir:
        path = stub_path(ctx)
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
        _relay(ctx, spec, _apply_text_stages(ctx, spec, text))
        return

    argv = resolve_argv(ctx, spec)
    host = ctx.config_text(spec.host_config) if spec.host_config else None
    argv = pick_transport(ctx, host).wrap(host or "", argv)
    if ctx.engine.clock.virtual:
        _run_sync(ctx, spec, argv)
    else:
        _run_streaming(ctx, spec, argv)


def pick_transport(ctx: NodeContext, host: str | None) -> Transport:
    transports = ctx.engine.transports or _DEFAULT_TRANSPORTS
    if "loopback" in transports:
        return transports["loopback"]
    if host in _LOCAL_HOSTS:
        return transports["local"]
    return transports["ssh"]


def _run_sync(ctx: NodeContext, spec: ToolSpec, argv: list[str]) -> None:
    try:
        proc = subprocess.run(
            argv, stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True
        )
    except OSError as err:
        ctx.write(0, f"ERROR: {err}\n")
        raise ToolError(f"cannot spawn {argv[0]}: {err}") from err
    _relay(ctx, spec, _apply_text_stages(ctx, spec, proc.stdout or ""))


def _run_streaming(ctx: NodeContext, spec: ToolSpec, argv: list[str]) -> None:
    try:
        proc = subprocess.Popen(
            argv,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
            bufsize=1,
        )
    except OSError as err:
        ctx.write(0, f"ERROR: {err}\n")
        raise ToolError(f"cannot spawn {argv[0]}: {err}") from err
    ctx.track_process(proc)
    engine = ctx.engine
    instance_id = ctx.instance_id

    def pump() -> None:
        collected: list[str] = []
        for line in proc.stdout:
            collected.append(line)
            engine.submit(_poster(engine, instance_id, line))
        proc.wait()
        text = "".join(collected)

        def finish() -> None:
            node_ctx = engine.context_for(instance_id)
            node_ctx.write(0, "")
            for extractor in spec.extractors:
                extractor(node_ctx, _apply_text_stages(node_ctx, spec, text))

        engine.submit(finish)

    threading.Thread(target=pump, name=f"tool-{instance_id}", daemon=True).start()


def _poster(engine, instance_id: str, line: str) -> Callable[[], None]:
    def write_line() -> None:
        engine.context_for(instance_id).write(0, line)

    return write_line


def filter_address_lines(text: str, address: str) -> str:
    """Keep lines that mention the address or whose network contains it.

    A line qualifies when the address appears literally, or when any
    dotted-quad field paired with a netmask-or-CIDR field covers it.
    """
    import ipaddress

    try:
        target = ipaddress.ip_address(address)
    except ValueError:
        target = None
    kept: list[str] = []
    for line in text.splitlines(keepends=True):
        if address in line:
            kept.append(line)
            continue
        if target is not None and _covers(line, target):
            kept.append(line)
    return "".join(kept)


def _covers(line: str, target) -> bool:
    import ipaddress

    fields = line.split()
    for i, word in enumerate(fields):
        try:
            if "/" in word:
                network = ipaddress.ip_network(word, strict=False)
            else:
                base = ipaddress.ip_address(word)
                mask = None
                for other in fields[i + 1 :]:
                    if not _looks_like_mask(other):
                        continue
                    # An all-zero field is a gateway placeholder unless the
                    # base itself is the default-route anchor.
                    if other == "0.0.0.0" and word != "0.0.0.0":
                        continue
                    mask = other
                    break
                if mask is None:
                    continue
                network = ipaddress.ip_network(f"{base}/{mask}", strict=False)
        except ValueError:
            continue
        if network.num_addresses > 1 and target in network:
            return True
    return False


def _looks_like_mask(word: str) -> bool:
    if not word.count(".") == 3:
        return False
    try:
        parts = [int(p) for p in word.split(".")]
    except ValueError:
        return False
    value = 0
    for part in parts:
        if not 0 <= part <= 255:
            return False
        value = (value << 8) | part
    # Contiguous leading ones.
    inverted = ~value & 0xFFFFFFFF
    return (inverted & (inverted + 1)) == 0
