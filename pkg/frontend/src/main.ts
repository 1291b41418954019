/** DOM wiring for the explorer: load -> solve -> click -> query -> explain. */

import { Client } from "./api.js";
import { refineDraft, draftIsValid } from "./draft.js";
import { offerForCell, panelHtml, solutionTableHtml, CellRef } from "./render.js";
import { ViewState } from "./state.js";
import { QueryDraft } from "./types.js";

const client = new Client("");
const state = new ViewState(client);

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function setStatus(text: string, isError = false): void {
  const el = $("status");
  el.textContent = text;
  el.className = isError ? "status error" : "status";
}

function renderSolution(): void {
  if (!state.solution) return;
  $("solution").innerHTML = solutionTableHtml(state.solution);
  $("fstar").textContent = state.fStar !== null ? `f* = ${state.fStar}` : "";
}

function renderDraft(offerKinds: string[]): void {
  const box = $("draft");
  if (!state.draft) {
    box.innerHTML = "<em>click a solution cell to start a query</em>";
    return;
  }
  const kindButtons = offerKinds
    .map((k) => `<button class="kind" data-kind="${k}">${k}</button>`)
    .join(" ");
  box.innerHTML =
    `<div class="offers">${kindButtons}</div>` +
    `<pre id="draft-json">${JSON.stringify(state.draft, null, 1)}</pre>` +
    `<label>extra (time_alt / activity_other / bid_other): <input id="extra" size="6"></label>` +
    `<button id="send" ${draftIsValid(state.draft) ? "" : "disabled"}>explain</button>`;
  box.querySelectorAll<HTMLButtonElement>("button.kind").forEach((button) => {
    button.addEventListener("click", () => {
      const kind = button.dataset.kind!;
      const extraRaw = (document.getElementById("extra") as HTMLInputElement)?.value;
      const extra = extraRaw ? parseInt(extraRaw, 10) : undefined;
      try {
        state.setDraft(
          refineDraft(state.draft as QueryDraft, kind, {
            time_alt: kind === "Q7" ? extra : undefined,
            activity_other: kind === "Q8" ? extra : undefined,
            bid_other: kind === "W4" ? extra : undefined,
          }),
        );
        renderDraft(offerKinds);
      } catch (err) {
        setStatus(`draft needs more input for ${kind}: ${String(err)}`, true);
      }
    });
  });
  document.getElementById("send")?.addEventListener("click", () => {
    void submit();
  });
}

async function submit(): Promise<void> {
  const algorithm = ($("algorithm") as HTMLSelectElement).value;
  setStatus("explaining…");
  try {
    const panel = await state.submitDraft(algorithm);
    const holder = document.createElement("div");
    holder.innerHTML = panelHtml(
      panel.index,
      panel.outcome,
      panel.scene,
      panel.notice,
      panel.iisSize,
      JSON.stringify(panel.query),
    );
    $("panels").prepend(holder.firstElementChild as HTMLElement);
    const entry = document.createElement("li");
    entry.textContent = `#${panel.index} ${panel.outcome} ${JSON.stringify(panel.query)}`;
    entry.addEventListener("click", () => {
      document
        .querySelector(`[data-panel="${panel.index}"]`)
        ?.scrollIntoView({ behavior: "smooth" });
    });
    $("history").appendChild(entry);
    setStatus(`answered: ${panel.outcome}`);
  } catch (err) {
    setStatus(String(err), true);
  }
}

function onSolutionClick(event: Event): void {
  const target = event.target as HTMLElement;
  if (!state.solution) return;
  let ref: CellRef | null = null;
  if (target.dataset.activity !== undefined && target.dataset.time !== undefined) {
    ref = {
      kind: "schedule",
      activity: parseInt(target.dataset.activity, 10),
      time: parseInt(target.dataset.time, 10),
    };
  } else {
    const row = target.closest<HTMLElement>("tr[data-bid]");
    if (row) ref = { kind: "auction", bid: parseInt(row.dataset.bid!, 10) };
  }
  if (!ref) return;
  const offer = offerForCell(ref, state.solution);
  if (!offer) return;
  state.setDraft(offer.draft);
  renderDraft(offer.kinds);
}

async function loadInstance(): Promise<void> {
  const family = ($("family") as HTMLSelectElement).value;
  const content = ($("instance-text") as HTMLTextAreaElement).value;
  if (!content.trim()) {
    setStatus("paste an instance first", true);
    return;
  }
  setStatus("loading + solving…");
  try {
    await state.load(family, content, "pasted");
    renderSolution();
    setStatus(`solved: f* = ${state.fStar}`);
  } catch (err) {
    setStatus(String(err), true);
  }
}

export function boot(): void {
  $("load").addEventListener("click", () => void loadInstance());
  $("solution").addEventListener("click", onSolutionClick);
  renderDraft([]);
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
