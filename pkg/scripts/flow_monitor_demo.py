#!/usr/bin/env python3
"""Flow monitoring pipeline against the bundled mock controller.

Starts the fixture REST server, polls it for datapaths, fans the dpid
list out to two flow-stat pollers, filters both dumps down to one source
address, and prints the rendered table.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from tsgraph import mockctl
from tsgraph.engine import EventKind, start_engine
from tsgraph.graph import build_graph
from tsgraph.lang import parse_document
from tsgraph.nodes import build_default_registry

ROOT = Path(__file__).resolve().parent.parent

DOC = """\
clock :: Clock(5);
dpids :: Dpids-SDN({ctl});
fan :: Function(identity, 'input-0);
fs1 :: Flow-stat-SDN({ctl});
fs2 :: Flow-stat-SDN({ctl});
filter1 :: Flow-space-filter({src}, nil);
filter2 :: Flow-space-filter({src}, nil);
table :: Table-view();
clock[0] -> dpids;
dpids[0] -> fan;
fan[0] -> fs1;
fan[1] -> fs2;
fs1[0] -> filter1;
fs2[0] -> filter2;
filter1[0] -> table;
filter2[0] -> [1]table;
table[0] -> v :: View();
"""


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--fixture-dir",
                        default=str(ROOT / "fixtures" / "controller" / "pox"),
                        help="controller fixture directory to serve")
    parser.add_argument("--src", default="10.0.0.1",
                        help="source address the filters keep")
    args = parser.parse_args(argv)

    server = mockctl.serve(args.fixture_dir, port=0)
    try:
        ctl = "127.0.0.1:%d" % server.server_address[1]
        doc = DOC.format(ctl=ctl, src=args.src)
        engine = start_engine(build_graph(parse_document(doc), build_default_registry()))
        engine.advance_to(0)
        errors = [e for e in engine.events if e.kind is EventKind.NODE_ERROR]
        for event in errors:
            print(f"error in {event.node_id}: {event.detail}", file=sys.stderr)
        print(engine.buffers["table:out0"].latest().text, end="")
        return 2 if errors else 0
    finally:
        server.shutdown()


if __name__ == "__main__":
    sys.exit(main())
