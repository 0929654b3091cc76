/** Pure model tests over fixtures recorded from a live engine. */
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import type { EngineEvent, Topology } from "../src/api.js";
import { parseSse } from "../src/api.js";
import {
  applyEvent, initModel, markViewed, navigate, neighborNodes, orderSummaryRows,
  parseSummaryTable, replay, summaryNodeIds, unreadCount,
} from "../src/model.js";
import { layerNodes } from "../src/graphview.js";

const here = dirname(fileURLToPath(import.meta.url));

const topology = JSON.parse(
  readFileSync(join(here, "fixtures", "topology_watch.topology.json"), "utf-8"),
) as Topology;

const events = readFileSync(join(here, "fixtures", "topology_watch.events.jsonl"), "utf-8")
  .trim()
  .split("\n")
  .map((line) => JSON.parse(line) as EngineEvent);

const EMPTY: Topology = { revision: 0, nodes: [], edges: [], views: [] };

describe("initModel", () => {
  it("mirrors the topology payload", () => {
    const model = initModel(topology);
    expect(model.order).toEqual(["Clock-1", "t", "Graph-1", "view"]);
    expect(model.edges).toHaveLength(4);
    expect(model.views).toHaveLength(1);
    expect(model.views[0]?.slots).toHaveLength(2);
    expect(Object.keys(model.buffers).sort()).toEqual([
      "Clock-1:out0", "Graph-1:self", "t:out0",
    ]);
  });

  it("renders an empty graph as an empty model", () => {
    const model = initModel(EMPTY);
    expect(model.order).toEqual([]);
    expect(model.edges).toEqual([]);
    expect(Object.keys(model.buffers)).toEqual([]);
  });
});

describe("event replay", () => {
  it("is deterministic", () => {
    expect(replay(topology, events)).toEqual(replay(topology, events));
  });

  it("equals applying events one at a time", () => {
    let model = initModel(topology);
    for (const event of events) model = applyEvent(model, event);
    expect(model).toEqual(replay(topology, events));
  });

  it("does not mutate the previous model", () => {
    const before = initModel(topology);
    const snapshot = structuredClone(before);
    applyEvent(before, events[events.length - 1]!);
    expect(before).toEqual(snapshot);
  });

  it("ignores replayed duplicates", () => {
    const model = replay(topology, events);
    expect(applyEvent(model, events[0]!)).toBe(model);
  });

  it("tracks buffer lengths from output-changed ranges", () => {
    const model = replay(topology, events);
    const appended = events.filter(
      (e) => e.kind === "output-changed" && e.buffer_id === "Clock-1:out0",
    );
    expect(model.buffers["Clock-1:out0"]?.length).toBe(appended.length);
  });

  it("badges executed nodes active and erroring nodes red", () => {
    const model = replay(topology, events);
    expect(model.nodes["Clock-1"]?.badge).toBe("active");
    expect(model.nodes["t"]?.badge).toBe("error");
    const recovered = applyEvent(model, {
      seq: model.lastEventSeq + 1,
      kind: "node-executed",
      timestamp: 99,
      node_id: "t",
    });
    expect(recovered.nodes["t"]?.badge).toBe("active");
  });
});

describe("unread counters", () => {
  it("counts length minus viewed", () => {
    let model = replay(topology, events);
    const length = model.buffers["t:out0"]?.length ?? 0;
    expect(length).toBeGreaterThan(0);
    expect(unreadCount(model, "t:out0")).toBe(length);
    model = markViewed(model, "t:out0", length);
    expect(unreadCount(model, "t:out0")).toBe(0);
  });

  it("never goes negative", () => {
    let model = replay(topology, events);
    model = markViewed(model, "t:out0", 10_000);
    expect(unreadCount(model, "t:out0")).toBe(0);
  });
});

describe("navigation", () => {
  const model = initModel(topology);

  it("moves forward to the downstream node", () => {
    expect(navigate(model, { kind: "node", id: "Clock-1" }, "forward"))
      .toEqual({ kind: "node", id: "t" });
  });

  it("is a no-op past the sink", () => {
    expect(navigate(model, { kind: "node", id: "view" }, "forward")).toBeNull();
  });

  it("jumps from a node to its first output buffer", () => {
    expect(navigate(model, { kind: "node", id: "t" }, "outputs"))
      .toEqual({ kind: "buffer", id: "t:out0" });
    expect(navigate(model, { kind: "node", id: "view" }, "outputs")).toBeNull();
  });

  it("follows a buffer to its consumer and back to its owner", () => {
    expect(navigate(model, { kind: "buffer", id: "t:out0" }, "forward"))
      .toEqual({ kind: "node", id: "Graph-1" });
    expect(navigate(model, { kind: "buffer", id: "t:out0" }, "backward"))
      .toEqual({ kind: "node", id: "t" });
  });

  it("orders neighbors by port then declaration", () => {
    expect(neighborNodes(model, "t", "forward")).toEqual(["Graph-1", "view"]);
    expect(neighborNodes(model, "view", "backward")).toEqual(["Graph-1", "t"]);
  });
});

describe("layout", () => {
  it("layers nodes by input depth", () => {
    expect(layerNodes(initModel(topology))).toEqual({
      "Clock-1": 0, t: 1, "Graph-1": 2, view: 3,
    });
  });

  it("survives a cycle", () => {
    const cyclic: Topology = {
      revision: 0,
      views: [],
      nodes: ["a", "b"].map((id) => ({
        id, class: "Echo", state: "running", doc: "", configs: [],
        inputs: [{ name: "in0", doc: "" }], outputs: [{ name: "out0", doc: "" }],
        config_slots: [],
      })),
      edges: [
        { id: "e0", src: { node: "a", output: 0 }, dst: { node: "b", kind: "input", index: 0 }, buffer_id: "a:out0" },
        { id: "e1", src: { node: "b", output: 0 }, dst: { node: "a", kind: "input", index: 0 }, buffer_id: "b:out0" },
      ],
    };
    const layers = layerNodes(initModel(cyclic));
    expect(Object.keys(layers).sort()).toEqual(["a", "b"]);
  });
});

describe("summary table", () => {
  const rendered = [
    "decision    result   detail",
    "ping-check  fail !   input 0 failed verification",
    "ifc-check   pass     lo ok",
    "input 2     pending",
    "OVERALL     fail",
    "",
  ].join("\n");

  it("parses rows with flags and pending state", () => {
    const rows = parseSummaryTable(rendered);
    expect(rows.map((r) => r.label)).toEqual(["ping-check", "ifc-check", "input 2", "OVERALL"]);
    expect(rows[0]).toMatchObject({ flagged: true, pending: false });
    expect(rows[1]).toMatchObject({ result: "pass", detail: "lo ok" });
    expect(rows[2]).toMatchObject({ pending: true });
  });

  it("floats failures to the top and keeps OVERALL last", () => {
    const ordered = orderSummaryRows(parseSummaryTable(rendered));
    expect(ordered.map((r) => r.label)).toEqual(
      ["ping-check", "ifc-check", "input 2", "OVERALL"],
    );
    const swapped = orderSummaryRows(parseSummaryTable([
      "decision    result   detail",
      "a-check     pass     fine",
      "b-check     fail !   nope",
      "OVERALL     fail",
    ].join("\n")));
    expect(swapped.map((r) => r.label)).toEqual(["b-check", "a-check", "OVERALL"]);
  });

  it("finds summary nodes by class", () => {
    expect(summaryNodeIds(initModel(topology))).toEqual([]);
  });
});

describe("sse parsing", () => {
  it("extracts data payloads and skips keepalives", () => {
    const body = [
      ": keepalive",
      'data: {"seq": 0, "kind": "lifecycle", "timestamp": 0.0}',
      "",
      'data: {"seq": 1, "kind": "node-executed", "timestamp": 0.0, "node_id": "t"}',
      "",
    ].join("\n");
    const parsed = parseSse(body);
    expect(parsed.map((e) => e.seq)).toEqual([0, 1]);
    expect(parsed[1]?.node_id).toBe("t");
  });
});
