/** Pure view model over the control API payloads.
 *
 * Everything here is a plain function from (topology, event stream,
 * focus) to data the renderers draw; replaying the same inputs always
 * rebuilds the same model, which is what the model tests pin down.
 */
import type { EngineEvent, Topology, TopologyEdge, TopologyView } from "./api.js";

export type Badge = "idle" | "active" | "error";

export interface NodeModel {
  id: string;
  klass: string;
  state: string;
  badge: Badge;
  configs: string[];
  inputCount: number;
  outputCount: number;
}

export interface BufferModel {
  id: string;
  length: number;
  viewed: number;
}

export interface UiGraphModel {
  revision: number;
  order: string[];
  nodes: Record<string, NodeModel>;
  edges: TopologyEdge[];
  views: TopologyView[];
  buffers: Record<string, BufferModel>;
  lastEventSeq: number;
}

export function initModel(topology: Topology): UiGraphModel {
  const nodes: Record<string, NodeModel> = {};
  const buffers: Record<string, BufferModel> = {};
  for (const node of topology.nodes) {
    nodes[node.id] = {
      id: node.id,
      klass: node.class,
      state: node.state,
      badge: "idle",
      configs: node.configs,
      inputCount: node.inputs.length,
      outputCount: node.outputs.length,
    };
    for (let i = 0; i < node.outputs.length; i++) {
      const id = `${node.id}:out${i}`;
      buffers[id] = { id, length: 0, viewed: 0 };
    }
  }
  for (const edge of topology.edges) {
    buffers[edge.buffer_id] ??= { id: edge.buffer_id, length: 0, viewed: 0 };
  }
  return {
    revision: topology.revision,
    order: topology.nodes.map((n) => n.id),
    nodes,
    edges: topology.edges,
    views: topology.views,
    buffers,
    lastEventSeq: -1,
  };
}

export function applyEvent(model: UiGraphModel, event: EngineEvent): UiGraphModel {
  if (event.seq <= model.lastEventSeq) return model; // replayed duplicate
  let next: UiGraphModel = { ...model, lastEventSeq: event.seq };
  if (event.kind === "output-changed" && event.buffer_id && event.range_end !== undefined) {
    const prior = model.buffers[event.buffer_id] ?? { id: event.buffer_id, length: 0, viewed: 0 };
    next = {
      ...next,
      buffers: {
        ...model.buffers,
        [event.buffer_id]: { ...prior, length: Math.max(prior.length, event.range_end) },
      },
    };
  } else if (event.kind === "node-executed" && event.node_id) {
    next = withBadge(next, event.node_id, "active");
  } else if (event.kind === "node-error" && event.node_id) {
    next = withBadge(next, event.node_id, "error");
  }
  return next;
}

function withBadge(model: UiGraphModel, nodeId: string, badge: Badge): UiGraphModel {
  const node = model.nodes[nodeId];
  if (!node) return model;
  return { ...model, nodes: { ...model.nodes, [nodeId]: { ...node, badge } } };
}

export function replay(topology: Topology, events: EngineEvent[]): UiGraphModel {
  return events.reduce(applyEvent, initModel(topology));
}

export function markViewed(model: UiGraphModel, bufferId: string, upTo: number): UiGraphModel {
  const buffer = model.buffers[bufferId];
  if (!buffer || buffer.viewed >= upTo) return model;
  return {
    ...model,
    buffers: { ...model.buffers, [bufferId]: { ...buffer, viewed: upTo } },
  };
}

export function unreadCount(model: UiGraphModel, bufferId: string): number {
  const buffer = model.buffers[bufferId];
  return buffer ? Math.max(0, buffer.length - buffer.viewed) : 0;
}

// --- navigation -------------------------------------------------------------

export interface Focus {
  kind: "node" | "buffer";
  id: string;
}

export type Direction = "forward" | "backward" | "outputs";

/** Adjacent node ids, matching the engine's neighbor ordering. */
export function neighborNodes(
  model: UiGraphModel, nodeId: string, direction: "forward" | "backward",
): string[] {
  const ranked: Array<[number, number, string]> = [];
  model.edges.forEach((edge, i) => {
    if (direction === "forward" && edge.src.node === nodeId) {
      ranked.push([edge.src.output ?? -1, i, edge.dst.node]);
    } else if (direction === "backward" && edge.dst.node === nodeId) {
      ranked.push([edge.dst.index, i, edge.src.node]);
    }
  });
  ranked.sort(([a0, a1], [b0, b1]) => a0 - b0 || a1 - b1);
  const out: string[] = [];
  for (const [, , id] of ranked) {
    if (!out.includes(id)) out.push(id);
  }
  return out;
}

/** Keyboard navigation; null means no neighbor, caller shows a hint. */
export function navigate(model: UiGraphModel, focus: Focus, direction: Direction): Focus | null {
  if (focus.kind === "node") {
    if (direction === "outputs") {
      const node = model.nodes[focus.id];
      return node && node.outputCount > 0 ? { kind: "buffer", id: `${focus.id}:out0` } : null;
    }
    const next = neighborNodes(model, focus.id, direction)[0];
    return next ? { kind: "node", id: next } : null;
  }
  if (direction === "backward") {
    const owner = focus.id.split(":")[0];
    return owner && model.nodes[owner] ? { kind: "node", id: owner } : null;
  }
  if (direction === "forward") {
    const edge = model.edges.find((e) => e.buffer_id === focus.id);
    return edge ? { kind: "node", id: edge.dst.node } : null;
  }
  return null;
}

// --- summary panel ----------------------------------------------------------

export interface SummaryRow {
  label: string;
  result: string;
  detail: string;
  flagged: boolean;
  pending: boolean;
}

/** Parse a rendered decision-summary table into rows (header dropped). */
export function parseSummaryTable(text: string): SummaryRow[] {
  const rows: SummaryRow[] = [];
  for (const line of text.split("\n").slice(1)) {
    if (!line.trim()) continue;
    const parts = line.split(/\s{2,}/);
    const label = parts[0] ?? "";
    const result = parts[1] ?? "";
    rows.push({
      label,
      result,
      detail: parts.slice(2).join("  "),
      flagged: result.endsWith("!"),
      pending: result === "pending",
    });
  }
  return rows;
}

/** Failures float to the top of the fold; OVERALL stays last. */
export function orderSummaryRows(rows: SummaryRow[]): SummaryRow[] {
  const overall = rows.filter((r) => r.label === "OVERALL");
  const rest = rows.filter((r) => r.label !== "OVERALL");
  const rank = (row: SummaryRow) => (row.flagged ? 0 : row.pending ? 2 : 1);
  return rest
    .map((row, i) => [rank(row), i, row] as const)
    .sort(([a0, a1], [b0, b1]) => a0 - b0 || a1 - b1)
    .map(([, , row]) => row)
    .concat(overall);
}

/** Ids of Decision-summary instances, in declaration order. */
export function summaryNodeIds(model: UiGraphModel): string[] {
  return model.order.filter((id) => model.nodes[id]?.klass === "Decision-summary");
}
