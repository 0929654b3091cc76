/** SVG node-link rendering of the graph model.
 *
 * Layout is a plain layered scheme: nodes sit in columns by longest
 * input-path depth, views hang below as containers listing their
 * slots.  Input edges draw solid, config edges dashed, node-self
 * edges dotted, matching the dot exporter.
 */
import type { UiGraphModel } from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_W = 150;
const NODE_H = 42;
const COL_GAP = 70;
const ROW_GAP = 26;
const MARGIN = 24;

export interface GraphHandlers {
  onSelectNode(nodeId: string): void;
}

interface Placed {
  x: number;
  y: number;
}

/** Column index per node: longest path over edges, cycle-capped. */
export function layerNodes(model: UiGraphModel): Record<string, number> {
  const depth: Record<string, number> = {};
  for (const id of model.order) depth[id] = 0;
  const bound = model.order.length;
  for (let pass = 0; pass < bound; pass++) {
    let moved = false;
    for (const edge of model.edges) {
      if (edge.src.node === edge.dst.node) continue;
      const src = depth[edge.src.node];
      const dst = depth[edge.dst.node];
      if (src === undefined || dst === undefined) continue;
      if (dst < src + 1 && src + 1 < bound) {
        depth[edge.dst.node] = src + 1;
        moved = true;
      }
    }
    if (!moved) break;
  }
  return depth;
}

function place(model: UiGraphModel): Record<string, Placed> {
  const depth = layerNodes(model);
  const columns: Record<number, string[]> = {};
  for (const id of model.order) {
    (columns[depth[id] ?? 0] ??= []).push(id);
  }
  const placed: Record<string, Placed> = {};
  for (const [col, ids] of Object.entries(columns)) {
    ids.forEach((id, row) => {
      placed[id] = {
        x: MARGIN + Number(col) * (NODE_W + COL_GAP),
        y: MARGIN + row * (NODE_H + ROW_GAP),
      };
    });
  }
  return placed;
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K, attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

function edgeClass(kind: string, selfEdge: boolean): string {
  if (selfEdge) return "edge self";
  return kind === "config" ? "edge config" : "edge input";
}

export function renderGraph(
  mount: HTMLElement,
  model: UiGraphModel,
  selected: string | null,
  handlers: GraphHandlers,
): void {
  mount.textContent = "";
  if (model.order.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-canvas";
    empty.textContent = "empty graph";
    mount.appendChild(empty);
    return;
  }
  const placed = place(model);
  const nodesBottom = Math.max(...Object.values(placed).map((p) => p.y + NODE_H));
  const nodesRight = Math.max(...Object.values(placed).map((p) => p.x + NODE_W));
  const viewTop = nodesBottom + 40;
  const viewHeight = model.views.length
    ? Math.max(...model.views.map((v) => 30 + v.slots.length * 16 + 8))
    : 0;

  const svg = el("svg", {
    width: String(nodesRight + MARGIN),
    height: String(viewTop + viewHeight + MARGIN),
    class: "graph",
  });

  for (const edge of model.edges) {
    const from = placed[edge.src.node];
    const to = placed[edge.dst.node];
    if (!from || !to) continue;
    const x1 = from.x + NODE_W;
    const y1 = from.y + NODE_H / 2;
    const x2 = to.x;
    const y2 = to.y + NODE_H / 2;
    const bend = Math.max(30, (x2 - x1) / 2);
    svg.appendChild(el("path", {
      d: `M ${x1} ${y1} C ${x1 + bend} ${y1}, ${x2 - bend} ${y2}, ${x2} ${y2}`,
      class: edgeClass(edge.dst.kind, edge.src.output === null),
    }));
  }

  for (const id of model.order) {
    const node = model.nodes[id];
    const at = placed[id];
    if (!node || !at) continue;
    const group = el("g", {
      transform: `translate(${at.x}, ${at.y})`,
      class: `node badge-${node.badge}${id === selected ? " selected" : ""}`,
      "data-node-id": id,
    });
    group.appendChild(el("rect", {
      width: String(NODE_W), height: String(NODE_H), rx: "6",
    }));
    const title = el("text", { x: "8", y: "17", class: "node-id" });
    title.textContent = id;
    group.appendChild(title);
    const klass = el("text", { x: "8", y: "33", class: "node-class" });
    klass.textContent = node.klass;
    group.appendChild(klass);
    group.addEventListener("click", () => handlers.onSelectNode(id));
    svg.appendChild(group);
  }

  model.views.forEach((view, i) => {
    const x = MARGIN + i * (NODE_W + COL_GAP);
    const group = el("g", {
      transform: `translate(${x}, ${viewTop})`,
      class: "view-container",
    });
    group.appendChild(el("rect", {
      width: String(NODE_W + 30),
      height: String(30 + view.slots.length * 16 + 8),
      rx: "6",
    }));
    const title = el("text", { x: "8", y: "18", class: "view-id" });
    title.textContent = `${view.id} (view)`;
    group.appendChild(title);
    view.slots.forEach((edgeId, slot) => {
      const edge = model.edges.find((e) => e.id === edgeId);
      const label = el("text", { x: "14", y: String(36 + slot * 16), class: "view-slot" });
      label.textContent = edge
        ? `[${slot}] ${edge.src.node}${edge.src.output === null ? "" : `:out${edge.src.output}`}`
        : `[${slot}] ?`;
      group.appendChild(label);
    });
    svg.appendChild(group);
  });

  mount.appendChild(svg);
}
