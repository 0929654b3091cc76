"""Mock SDN controller serving recorded fixture JSON over HTTP.

Serves a fixture directory holding dpids.json, flowstats.json, and
topology.json.  flowstats.json is keyed by dpid; the other two are
returned verbatim.  Endpoints mirror the shapes the controller query
nodes expect: /dpids, /flowstats/<dpid>, /topology.
"""
from __future__ import annotations

import argparse
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path


class FixtureHandler(BaseHTTPRequestHandler):
    fixture_dir: Path

    def do_GET(self) -> None:  # noqa: N802 (http.server API)
        body = self._lookup(self.path.rstrip("/"))
        if body is None:
            self.send_error(404)
            return
        payload = body.encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _lookup(self, path: str) -> str | None:
        if path == "/dpids":
            return self._read("dpids.json")
        if path == "/topology":
            return self._read("topology.json")
        if path.startswith("/flowstats/"):
            table = self._read("flowstats.json")
            if table is None:
                return None
            entry = json.loads(table).get(path[len("/flowstats/"):])
            return None if entry is None else json.dumps(entry)
        return None

    def _read(self, name: str) -> str | None:
        target = self.fixture_dir / name
        if not target.is_file():
            return None
        return target.read_text(encoding="utf-8")

    def log_message(self, format: str, *args) -> None:  # noqa: A002
        pass


def serve(fixture_dir: str | Path, port: int = 0) -> ThreadingHTTPServer:
    """Start serving in a daemon thread; the caller owns shutdown()."""
    handler = type("Handler", (FixtureHandler,), {"fixture_dir": Path(fixture_dir)})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("fixture_dir", type=Path)
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args(argv)
    if not args.fixture_dir.is_dir():
        parser.error(f"{args.fixture_dir} is not a directory")
    server = serve(args.fixture_dir, args.port)
    host, port = server.server_address[:2]
    print(f"serving {args.fixture_dir} on http://{host}:{port}", flush=True)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
