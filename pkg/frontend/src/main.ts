/** DOM wiring for the sandbox. Everything interesting lives in the pure
 * modules (api/store/layout/render/palette); this file only moves strings
 * between them and the page. */

import { ApiClient } from "./api.js";
import { layoutGraph } from "./layout.js";
import { OP_FORMS, coerceParams } from "./palette.js";
import {
  renderConsolidationDiff,
  renderGraphSvg,
  renderHistory,
  renderMeasures,
  renderToast,
} from "./render.js";
import { SessionStore } from "./store.js";

const api = new ApiClient(localStorage.getItem("moneygraph_api") ?? "");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

let store: SessionStore | null = null;

function redraw(): void {
  if (!store) return;
  el("graph").innerHTML = renderGraphSvg(store.snapshot, store.sheets, layoutGraph(store.snapshot, store.sid));
  el("measures").innerHTML = renderMeasures(store.measures);
  el("history").innerHTML = renderHistory(store.history, store.opsApplied);
  el("toast-area").innerHTML = renderToast(store.toast);
  el<HTMLElement>("session-label").textContent = store.sid.slice(0, 8);
}

function buildPalette(): void {
  const select = el<HTMLSelectElement>("op-select");
  select.innerHTML = OP_FORMS.map((f) => `<option value="${f.name}">${f.label}</option>`).join("");
  select.addEventListener("change", buildFields);
  buildFields();
}

function buildFields(): void {
  const select = el<HTMLSelectElement>("op-select");
  const form = OP_FORMS.find((f) => f.name === select.value);
  if (!form) return;
  el("op-fields").innerHTML = form.fields
    .map(
      (f) =>
        `<label>${f.key}${f.optional ? " (optional)" : ""}` +
        `<input name="${f.key}" data-kind="${f.kind}" autocomplete="off"></label>`,
    )
    .join("");
}

async function applyFromForm(): Promise<void> {
  if (!store) return;
  const select = el<HTMLSelectElement>("op-select");
  const form = OP_FORMS.find((f) => f.name === select.value);
  if (!form) return;
  const raw: Record<string, string> = {};
  for (const input of el("op-fields").querySelectorAll("input")) {
    raw[(input as HTMLInputElement).name] = (input as HTMLInputElement).value;
  }
  try {
    const params = coerceParams(form.fields, raw);
    await store.applyOp(form.name, params);
  } catch (e) {
    el("toast-area").innerHTML = renderToast(e instanceof Error ? e.message : String(e));
  }
}

async function showConsolidation(): Promise<void> {
  if (!store) return;
  try {
    const view = await store.consolidateCompare();
    el("diff-area").innerHTML = renderConsolidationDiff(
      view.before,
      view.after,
      view.beforeSheets,
      view.afterSheets,
      view.removedEdgeIds,
      store.sid,
      (s, id) => layoutGraph(s, id),
    );
  } catch (e) {
    el("toast-area").innerHTML = renderToast(e instanceof Error ? e.message : String(e));
  }
}

async function boot(): Promise<void> {
  const regime = el<HTMLSelectElement>("regime-select").value;
  const body: Record<string, unknown> = { regime: { kind: regime } };
  const config: Record<string, boolean> = {};
  if (el<HTMLInputElement>("flag-intraday").checked) config.cb_intraday_credit = true;
  if (el<HTMLInputElement>("flag-overdraft").checked) config.treasury_overdraft = true;
  if (regime === "convertible" && el<HTMLInputElement>("flag-backing").checked) {
    (body.regime as Record<string, unknown>).full_backing = true;
  }
  if (Object.keys(config).length) body.config = config;
  store = await SessionStore.create(api, body);
  store.subscribe(redraw);
  redraw();
}

window.addEventListener("DOMContentLoaded", () => {
  buildPalette();
  el("new-session").addEventListener("click", () => void boot());
  el("apply-op").addEventListener("click", () => void applyFromForm());
  el("undo").addEventListener("click", () => void store?.undo());
  el("fork").addEventListener("click", async () => {
    if (!store) return;
    store = await store.fork();
    store.subscribe(redraw);
    redraw();
  });
  el("consolidate-toggle").addEventListener("click", () => void showConsolidation());
});
