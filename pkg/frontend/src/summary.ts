/** Decision-summary panel: live verdict table per summary node. */
import type { SummaryRow } from "./model.js";
import { orderSummaryRows } from "./model.js";

export function renderSummaryPanel(
  mount: HTMLElement, tables: Array<{ nodeId: string; rows: SummaryRow[] }>,
): void {
  mount.textContent = "";
  if (tables.length === 0) {
    const p = document.createElement("p");
    p.className = "hint";
    p.textContent = "no Decision-summary node in this graph";
    mount.appendChild(p);
    return;
  }
  for (const { nodeId, rows } of tables) {
    const caption = document.createElement("h3");
    caption.textContent = nodeId;
    mount.appendChild(caption);
    if (rows.length === 0) {
      const p = document.createElement("p");
      p.className = "hint";
      p.textContent = "no verdicts yet";
      mount.appendChild(p);
      continue;
    }
    const table = document.createElement("table");
    table.className = "summary";
    for (const row of orderSummaryRows(rows)) {
      const tr = document.createElement("tr");
      tr.className = row.flagged ? "flagged" : row.pending ? "pending" : "";
      if (row.label === "OVERALL") tr.classList.add("overall");
      for (const cell of [row.label, row.result, row.detail]) {
        const td = document.createElement("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    mount.appendChild(table);
  }
}
