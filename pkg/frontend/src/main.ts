/** Console bootstrap: one fetch + one event stream + one render loop. */
import { ApiClient } from "./api.js";
import type { EdgeRequest } from "./api.js";
import { openEventStream } from "./events.js";
import type { StreamHandle, StreamState } from "./events.js";
import {
  applyEvent, initModel, markViewed, navigate, parseSummaryTable, summaryNodeIds,
} from "./model.js";
import type { Focus, UiGraphModel } from "./model.js";
import { renderGraph } from "./graphview.js";
import { emptyPane, loadPage, renderBufferPane, tailSeq } from "./buffers.js";
import type { BufferPaneState } from "./buffers.js";
import { renderSummaryPanel } from "./summary.js";
import {
  renderEditForms, submitCommit, submitConfig, submitEdge, submitInject,
} from "./actions.js";
import type { SummaryRow } from "./model.js";

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  return param ? param.replace(/\/$/, "") : "";
}

const api = new ApiClient(apiBase());

let model: UiGraphModel | null = null;
let focus: Focus | null = null;
let pane: BufferPaneState = emptyPane();
let streamState: StreamState = "connecting";
let stream: StreamHandle | null = null;
let summaries: Array<{ nodeId: string; rows: SummaryRow[] }> = [];
let renderQueued = false;

const mounts = {
  graph: document.getElementById("graph") as HTMLElement,
  buffers: document.getElementById("buffers") as HTMLElement,
  summary: document.getElementById("summary") as HTMLElement,
  edits: document.getElementById("edits") as HTMLElement,
  status: document.getElementById("status") as HTMLElement,
  counts: document.getElementById("counts") as HTMLElement,
  toast: document.getElementById("toast") as HTMLElement,
};

function scheduleRender(): void {
  if (renderQueued) return;
  renderQueued = true;
  requestAnimationFrame(() => {
    renderQueued = false;
    render();
  });
}

function render(): void {
  mounts.status.textContent = streamState;
  mounts.status.className = `stream-${streamState}`;
  if (!model) {
    mounts.counts.textContent = "";
    return;
  }
  mounts.counts.textContent =
    `${model.order.length} nodes, ${model.edges.length} edges, revision ${model.revision}`;
  renderGraph(mounts.graph, model, focus?.kind === "node" ? focus.id : null, {
    onSelectNode: (nodeId) => {
      focus = { kind: "node", id: nodeId };
      openOutputs(nodeId);
    },
  });
  renderBufferPane(mounts.buffers, model, pane, {
    onPage: (fromSeq) => void turnPage(fromSeq),
    onInject: (text) => void doInject(text),
  });
  renderSummaryPanel(mounts.summary, summaries);
  renderEditForms(mounts.edits, model, {
    onAddEdge: (edge) => void doAddEdge(edge),
    onSetConfig: (node, index, value) => void doSetConfig(node, index, value),
    onCommit: () => void doCommit(),
  });
}

function toast(message: string, ok: boolean): void {
  mounts.toast.textContent = message;
  mounts.toast.className = ok ? "toast ok" : "toast err";
  window.setTimeout(() => {
    if (mounts.toast.textContent === message) mounts.toast.textContent = "";
  }, 4000);
}

async function refreshSummaries(): Promise<void> {
  if (!model) return;
  const tables: Array<{ nodeId: string; rows: SummaryRow[] }> = [];
  for (const nodeId of summaryNodeIds(model)) {
    const bufferId = `${nodeId}:out0`;
    const total = model.buffers[bufferId]?.length ?? 0;
    if (total === 0) {
      tables.push({ nodeId, rows: [] });
      continue;
    }
    const page = await api.bufferPage(bufferId, total - 1, 1);
    const latest = page.records[page.records.length - 1];
    tables.push({ nodeId, rows: latest ? parseSummaryTable(latest.text) : [] });
  }
  summaries = tables;
  scheduleRender();
}

async function openOutputs(nodeId: string): Promise<void> {
  if (!model) return;
  const node = model.nodes[nodeId];
  if (!node || node.outputCount === 0) return;
  await focusBuffer(`${nodeId}:out0`);
}

async function focusBuffer(bufferId: string): Promise<void> {
  if (!model) return;
  const total = model.buffers[bufferId]?.length ?? 0;
  pane = await loadPage(api, bufferId, tailSeq(total));
  model = markViewed(model, bufferId, total);
  scheduleRender();
}

async function turnPage(fromSeq: number): Promise<void> {
  const bufferId = pane.bufferId;
  if (!bufferId) return;
  pane = await loadPage(api, bufferId, fromSeq);
  if (model && pane.page) model = markViewed(model, bufferId, pane.page.next_seq);
  scheduleRender();
}

async function doInject(text: string): Promise<void> {
  if (!pane.bufferId) return;
  const outcome = await submitInject(api, pane.bufferId, text);
  toast(outcome.message, outcome.ok);
  if (outcome.ok) await focusBuffer(pane.bufferId);
}

async function doAddEdge(edge: EdgeRequest): Promise<void> {
  const outcome = await submitEdge(api, edge);
  toast(outcome.message, outcome.ok);
  if (outcome.ok) await reloadTopology();
}

async function doSetConfig(node: string, index: number, value: string): Promise<void> {
  const outcome = await submitConfig(api, node, index, value);
  toast(outcome.message, outcome.ok);
  if (outcome.ok) await reloadTopology();
}

async function doCommit(): Promise<void> {
  const outcome = await submitCommit(api);
  toast(outcome.message, outcome.ok);
}

function consume(event: Parameters<typeof applyEvent>[1]): void {
  if (!model) return;
  const before = model;
  model = applyEvent(model, event);
  if (model === before) return;
  if (event.kind === "output-changed" && event.buffer_id) {
    const summaryBuffer = summaryNodeIds(model).some((id) => `${id}:out0` === event.buffer_id);
    if (summaryBuffer) void refreshSummaries();
    if (event.buffer_id === pane.bufferId) void focusBuffer(event.buffer_id);
  }
  scheduleRender();
}

/** Full resync: topology snapshot, then replay the log from zero. */
async function reloadTopology(): Promise<void> {
  stream?.close();
  const topology = await api.topology();
  let fresh = initModel(topology);
  const backlog = await api.eventsSince(0, 10000);
  for (const event of backlog) fresh = applyEvent(fresh, event);
  model = fresh;
  stream = openEventStream(api, fresh.lastEventSeq + 1, {
    onEvent: consume,
    onState: (state) => {
      streamState = state;
      if (state === "lagged") void reloadTopology();
      scheduleRender();
    },
  });
  await refreshSummaries();
  if (pane.bufferId && model.buffers[pane.bufferId]) await focusBuffer(pane.bufferId);
  scheduleRender();
}

window.addEventListener("keydown", (event) => {
  if (!model || !focus) return;
  if (event.target instanceof HTMLInputElement
      || event.target instanceof HTMLTextAreaElement) return;
  const direction = { n: "forward", p: "backward", o: "outputs" }[event.key];
  if (!direction) return;
  const next = navigate(model, focus, direction as "forward" | "backward" | "outputs");
  if (!next) {
    toast(`no ${direction} neighbor`, false);
    return;
  }
  focus = next;
  if (next.kind === "buffer") void focusBuffer(next.id);
  scheduleRender();
});

reloadTopology().catch((err) => {
  streamState = "offline";
  toast(`control API unreachable: ${err}`, false);
  scheduleRender();
});
