/** HTML rendering for the solution table and explanation panels.
 *
 * The schedule view draws one row per activity over the time grid; cells
 * inside the completion window are clickable.  The realized completion
 * carries the veto-style offer, empty window cells the enforce-style one.
 */

import { scheduleOffer, auctionOffer, DraftOffer } from "./draft.js";
import { Scene, sceneToSvg } from "./scene.js";
import { SolutionDoc, ScheduleRowDoc, AuctionRowDoc } from "./types.js";

function esc(text: string | number): string {
  return String(text)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface CellRef {
  kind: "schedule" | "auction";
  activity?: number;
  time?: number;
  bid?: number;
}

export function solutionTableHtml(solution: SolutionDoc): string {
  if (solution.kind === "schedule") {
    return scheduleTableHtml(solution.rows, solution.horizon);
  }
  if (solution.kind === "auction") {
    return auctionTableHtml(solution.rows);
  }
  const rows = solution.rows
    .map((r) => `<tr><td>${esc(r.variable)}</td><td>${esc(r.value)}</td></tr>`)
    .join("");
  return `<table class="solution"><thead><tr><th>variable</th><th>value</th></tr></thead><tbody>${rows}</tbody></table>`;
}

function scheduleTableHtml(rows: ScheduleRowDoc[], horizon: number): string {
  const header = Array.from({ length: horizon + 1 }, (_, t) => `<th>${t}</th>`).join("");
  const body = rows
    .map((row) => {
      const cells: string[] = [];
      for (let t = 0; t <= horizon; t += 1) {
        const inWindow = t >= row.window[0] && t <= row.window[1];
        const active = row.duration > 0 && t >= row.start && t <= row.completion;
        const realized = t === row.completion;
        const classes = [
          inWindow ? "window" : "",
          active ? "active" : "",
          realized ? "realized" : "",
        ]
          .filter(Boolean)
          .join(" ");
        const clickable = inWindow && !row.is_dummy;
        const attrs = clickable
          ? ` data-activity="${row.activity}" data-time="${t}" data-realized="${realized}" data-realized-time="${row.completion}" data-ef="${row.window[0]}" data-lf="${row.window[1]}" role="button"`
          : "";
        cells.push(`<td class="cell ${classes}"${attrs}></td>`);
      }
      const preds = row.predecessors.join(",") || "-";
      return (
        `<tr><th class="rowhead">${esc(row.activity)}${row.is_dummy ? "*" : ""}</th>` +
        `<td class="meta">${esc(row.start)}-${esc(row.completion)}</td>` +
        `<td class="meta">${esc(preds)}</td>${cells.join("")}</tr>`
      );
    })
    .join("");
  return (
    `<table class="solution schedule"><thead><tr><th>act</th><th>start-end</th><th>preds</th>${header}</tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

function auctionTableHtml(rows: AuctionRowDoc[]): string {
  const body = rows
    .map(
      (row) =>
        `<tr class="${row.selected ? "winner" : "loser"}" data-bid="${row.bid}" data-selected="${row.selected}" role="button">` +
        `<td>${esc(row.bid)}</td><td>${esc(row.price)}</td>` +
        `<td>${row.goods.map(esc).join(", ")}</td>` +
        `<td>${row.selected ? "selected" : "-"}</td></tr>`,
    )
    .join("");
  return (
    `<table class="solution auction"><thead><tr><th>bid</th><th>price</th><th>goods</th><th>status</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function offerForCell(ref: CellRef, solution: SolutionDoc): DraftOffer | null {
  if (ref.kind === "schedule" && solution.kind === "schedule") {
    const row = solution.rows.find((r) => r.activity === ref.activity);
    if (!row || ref.time === undefined) return null;
    return scheduleOffer({
      activity: row.activity,
      time: ref.time,
      realized: ref.time === row.completion,
      realizedTime: row.completion,
      window: row.window,
    });
  }
  if (ref.kind === "auction" && solution.kind === "auction") {
    const row = solution.rows.find((r) => r.bid === ref.bid);
    if (!row) return null;
    return auctionOffer(row, solution.rows);
  }
  return null;
}

export function panelHtml(
  index: number,
  outcome: string,
  scene: Scene | null,
  notice: string | null,
  iisSize: number | null,
  queryJson: string,
): string {
  const badge = `<span class="badge badge-${esc(outcome)}">${esc(outcome)}</span>`;
  const meta = iisSize !== null ? `<span class="iis-size">IIS size ${iisSize}</span>` : "";
  const body = scene
    ? sceneToSvg(scene)
    : `<p class="notice">${esc(notice ?? "")}</p>`;
  return (
    `<section class="panel" data-panel="${index}">` +
    `<header>#${index} ${badge} ${meta} <code>${esc(queryJson)}</code></header>` +
    `${body}</section>`
  );
}
