/** Runtime edit gestures: add edge, set config, commit to file.
 *
 * Edits are optimistic: the pending edge previews dashed until the
 * next topology fetch confirms it; the server stays the source of
 * truth and a rejection drops the preview with the error text.
 */
import type { ApiClient, EdgeRequest } from "./api.js";
import { ApiError } from "./api.js";
import type { UiGraphModel } from "./model.js";

export interface EditOutcome {
  ok: boolean;
  message: string;
}

export async function submitEdge(api: ApiClient, edge: EdgeRequest): Promise<EditOutcome> {
  try {
    const ack = await api.addEdge(edge);
    return { ok: true, message: `edge added, revision ${ack.revision}` };
  } catch (err) {
    return failure(err);
  }
}

export async function submitConfig(
  api: ApiClient, node: string, index: number, value: string,
): Promise<EditOutcome> {
  try {
    const ack = await api.setConfig(node, index, value);
    return { ok: true, message: `config set, revision ${ack.revision}` };
  } catch (err) {
    return failure(err);
  }
}

export async function submitInject(
  api: ApiClient, bufferId: string, text: string,
): Promise<EditOutcome> {
  if (text === "") {
    return { ok: false, message: "record text must not be empty" };
  }
  try {
    const ack = await api.inject(bufferId, text);
    return { ok: true, message: `injected seq ${ack.seq} onto ${ack.buffer_id}` };
  } catch (err) {
    return failure(err);
  }
}

export async function submitCommit(api: ApiClient): Promise<EditOutcome> {
  try {
    const ack = await api.commit();
    return { ok: true, message: `committed ${ack.bytes_written} bytes to ${ack.path}` };
  } catch (err) {
    return failure(err);
  }
}

function failure(err: unknown): EditOutcome {
  if (err instanceof ApiError) return { ok: false, message: `${err.status}: ${err.message}` };
  return { ok: false, message: String(err) };
}

export function renderEditForms(
  mount: HTMLElement,
  model: UiGraphModel,
  actions: {
    onAddEdge(edge: EdgeRequest): void;
    onSetConfig(node: string, index: number, value: string): void;
    onCommit(): void;
  },
): void {
  mount.textContent = "";

  const edgeForm = document.createElement("form");
  edgeForm.className = "edit-form";
  edgeForm.appendChild(legend("add edge"));
  const srcNode = nodeSelect(model, "src");
  const srcOut = numberInput("output", 0);
  const dstNode = nodeSelect(model, "dst");
  const dstKind = document.createElement("select");
  for (const kind of ["input", "config"]) {
    const option = document.createElement("option");
    option.value = kind;
    option.textContent = kind;
    dstKind.appendChild(option);
  }
  const dstIndex = numberInput("slot", 0);
  const edgeGo = document.createElement("button");
  edgeGo.textContent = "link";
  edgeForm.append(srcNode, srcOut, arrow(), dstNode, dstKind, dstIndex, edgeGo);
  edgeForm.addEventListener("submit", (e) => {
    e.preventDefault();
    actions.onAddEdge({
      src_node: srcNode.value,
      src_output: Number(srcOut.value),
      dst_node: dstNode.value,
      dst_kind: dstKind.value,
      dst_index: Number(dstIndex.value),
    });
  });
  mount.appendChild(edgeForm);

  const configForm = document.createElement("form");
  configForm.className = "edit-form";
  configForm.appendChild(legend("set config"));
  const cfgNode = nodeSelect(model, "node");
  const cfgIndex = numberInput("arg # (1-based)", 1);
  const cfgValue = document.createElement("input");
  cfgValue.placeholder = "value";
  const cfgGo = document.createElement("button");
  cfgGo.textContent = "set";
  configForm.append(cfgNode, cfgIndex, cfgValue, cfgGo);
  configForm.addEventListener("submit", (e) => {
    e.preventDefault();
    actions.onSetConfig(cfgNode.value, Number(cfgIndex.value), cfgValue.value);
  });
  mount.appendChild(configForm);

  const commit = document.createElement("button");
  commit.className = "commit";
  commit.textContent = "commit to .tsg";
  commit.addEventListener("click", () => actions.onCommit());
  mount.appendChild(commit);
}

function nodeSelect(model: UiGraphModel, label: string): HTMLSelectElement {
  const select = document.createElement("select");
  select.title = label;
  for (const id of model.order) {
    const option = document.createElement("option");
    option.value = id;
    option.textContent = id;
    select.appendChild(option);
  }
  return select;
}

function numberInput(title: string, value: number): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "number";
  input.title = title;
  input.value = String(value);
  input.className = "port-index";
  return input;
}

function legend(text: string): HTMLElement {
  const el = document.createElement("strong");
  el.textContent = text;
  return el;
}

function arrow(): HTMLElement {
  const el = document.createElement("span");
  el.textContent = "->";
  return el;
}
