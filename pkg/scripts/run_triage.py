#!/usr/bin/env python3
"""Run the connectivity triage graph against recorded tool transcripts.

Each scenario directory under fixtures/scenarios freezes one state of the
example network.  The script replays the graph against a chosen scenario
(or all of them) and prints which nodes ran plus the final summary table.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from tsgraph.engine import EventKind, start_engine
from tsgraph.graph import build_graph
from tsgraph.lang import parse_document
from tsgraph.nodes import build_default_registry

ROOT = Path(__file__).resolve().parent.parent
GRAPH = ROOT / "fixtures" / "graphs" / "connectivity_full.tsg"
SCENARIOS = ROOT / "fixtures" / "scenarios"


def run_one(name: str) -> None:
    tsg = build_graph(parse_document(GRAPH.read_text()), build_default_registry())
    engine = start_engine(tsg, stub_dir=str(SCENARIOS / name))
    ran = sorted({e.node_id for e in engine.events if e.kind is EventKind.NODE_EXECUTED})
    print(f"=== {name} ===")
    print(f"executed: {', '.join(ran)}")
    summary = engine.buffers["summary:out0"].latest()
    print(summary.text if summary else "(no summary)")


def main(argv: list[str] | None = None) -> int:
    choices = sorted(p.name for p in SCENARIOS.iterdir() if p.is_dir())
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("scenario", nargs="?", choices=choices,
                        help="scenario to replay (default: all)")
    args = parser.parse_args(argv)
    for name in [args.scenario] if args.scenario else choices:
        run_one(name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
