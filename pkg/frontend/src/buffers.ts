/** Buffer pane: paged record history for one stream. */
import type { ApiClient, BufferPage } from "./api.js";
import type { UiGraphModel } from "./model.js";
import { unreadCount } from "./model.js";

export const PAGE_SIZE = 50;

export interface BufferPaneState {
  bufferId: string | null;
  page: BufferPage | null;
  error: string | null;
}

export function emptyPane(): BufferPaneState {
  return { bufferId: null, page: null, error: null };
}

/** Long histories stay cheap: only one page is ever held. */
export async function loadPage(
  api: ApiClient, bufferId: string, fromSeq: number,
): Promise<BufferPaneState> {
  try {
    const page = await api.bufferPage(bufferId, fromSeq, PAGE_SIZE);
    return { bufferId, page, error: null };
  } catch (err) {
    return { bufferId, page: null, error: String(err) };
  }
}

/** First seq of the page that shows the newest records. */
export function tailSeq(total: number): number {
  return Math.max(0, total - PAGE_SIZE);
}

export function renderBufferPane(
  mount: HTMLElement,
  model: UiGraphModel,
  pane: BufferPaneState,
  actions: {
    onPage(fromSeq: number): void;
    onInject(text: string): void;
  },
): void {
  mount.textContent = "";
  if (!pane.bufferId) {
    mount.appendChild(hint("select a node, then one of its output buffers"));
    return;
  }
  const head = document.createElement("div");
  head.className = "pane-head";
  const title = document.createElement("strong");
  title.textContent = pane.bufferId;
  head.appendChild(title);
  const unread = unreadCount(model, pane.bufferId);
  if (unread > 0) {
    const chip = document.createElement("span");
    chip.className = "chip unread";
    chip.textContent = `${unread} unread`;
    head.appendChild(chip);
  }
  mount.appendChild(head);

  if (pane.error) {
    mount.appendChild(hint(pane.error));
    return;
  }
  const page = pane.page;
  if (!page) return;

  const pager = document.createElement("div");
  pager.className = "pager";
  const first = page.records[0];
  const older = document.createElement("button");
  older.textContent = "older";
  older.disabled = !first || first.seq === 0;
  older.addEventListener("click", () => {
    if (first) actions.onPage(Math.max(0, first.seq - PAGE_SIZE));
  });
  const newer = document.createElement("button");
  newer.textContent = "newest";
  newer.addEventListener("click", () => actions.onPage(tailSeq(page.total)));
  const span = document.createElement("span");
  span.textContent = page.records.length
    ? `${first?.seq}..${page.next_seq - 1} of ${page.total}`
    : `empty (${page.total} total)`;
  pager.append(older, newer, span);
  mount.appendChild(pager);

  const list = document.createElement("ol");
  list.className = "records";
  for (const record of page.records) {
    const item = document.createElement("li");
    item.value = record.seq;
    if (record.origin === "injected") {
      const flag = document.createElement("span");
      flag.className = "chip injected";
      flag.textContent = "injected";
      item.appendChild(flag);
    }
    const pre = document.createElement("pre");
    pre.textContent = record.text === "" ? "(exit pulse)" : record.text;
    item.appendChild(pre);
    list.appendChild(item);
  }
  mount.appendChild(list);

  const form = document.createElement("form");
  form.className = "inject-form";
  const input = document.createElement("textarea");
  input.rows = 2;
  input.placeholder = "record text to inject";
  const submit = document.createElement("button");
  submit.textContent = "inject";
  form.append(input, submit);
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    actions.onInject(input.value);
    input.value = "";
  });
  mount.appendChild(form);
}

function hint(text: string): HTMLParagraphElement {
  const p = document.createElement("p");
  p.className = "hint";
  p.textContent = text;
  return p;
}
