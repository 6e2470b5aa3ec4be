/**
 * Pure rendering: state in, markup strings out. No DOM access here, so the
 * whole visual layer is unit-testable in node.
 *
 * Every number shown is a string copied from an API payload.
 */

import type { Point } from "./layout.js";
import type { HistoryEntry, MeasureReport, SheetJson, Snapshot } from "./types.js";

const KIND_COLORS: Record<string, string> = {
  central_bank: "#7c3aed",
  treasury: "#b45309",
  bank: "#1d4ed8",
  nonbank: "#047857",
  foreign: "#be123c",
};

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderMeasures(measures: MeasureReport[]): string {
  if (!measures.length) {
    return '<p class="empty">no currencies yet</p>';
  }
  const cards = measures.map((m) => {
    const sectors = Object.entries(m.sector_positions)
      .map(([kind, v]) => `<tr><td>${escapeHtml(kind)}</td><td class="num">${escapeHtml(v)}</td></tr>`)
      .join("");
    return `
      <div class="measure-card" data-currency="${escapeHtml(m.currency)}">
        <h3>${escapeHtml(m.currency)}</h3>
        <dl>
          <dt>base money</dt><dd data-measure="base_money">${escapeHtml(m.base_money)}</dd>
          <dt>broad money</dt><dd data-measure="broad_money">${escapeHtml(m.broad_money)}</dd>
          <dt>net money</dt><dd data-measure="net_money">${escapeHtml(m.net_money)}</dd>
        </dl>
        <details><summary>sector positions</summary><table>${sectors}</table></details>
      </div>`;
  });
  return cards.join("\n");
}

export function netWorthBadges(sheets: SheetJson[], agentId: number): string[] {
  return sheets
    .filter((s) => s.agent === agentId)
    .map((s) => `${s.unit}: ${s.net_worth}`);
}

export interface GraphRenderOptions {
  width?: number;
  height?: number;
  highlightEdges?: Set<number>;
  title?: string;
}

export function renderGraphSvg(
  snapshot: Snapshot,
  sheets: SheetJson[],
  positions: Map<number, Point>,
  options: GraphRenderOptions = {},
): string {
  const width = options.width ?? 860;
  const height = options.height ?? 560;
  const highlight = options.highlightEdges ?? new Set<number>();
  const byId = new Map(snapshot.agents.map((a) => [a.id, a]));
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg" class="graph">`,
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="22" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#64748b"/></marker></defs>`,
  );
  if (options.title) {
    parts.push(`<text x="12" y="22" class="title">${escapeHtml(options.title)}</text>`);
  }
  for (const inst of snapshot.instruments) {
    const from = positions.get(inst.debtor);
    const to = positions.get(inst.creditor);
    if (!from || !to) continue;
    const mx = (from.x + to.x) / 2;
    const my = (from.y + to.y) / 2;
    const cls = highlight.has(inst.id) ? "edge removed" : "edge";
    const label = `${inst.kind}:${inst.amount} ${inst.currency}`;
    parts.push(
      `<g class="${cls}" data-instrument="${inst.id}">` +
        `<line x1="${from.x.toFixed(1)}" y1="${from.y.toFixed(1)}" x2="${to.x.toFixed(1)}" y2="${to.y.toFixed(1)}" marker-end="url(#arrow)"/>` +
        `<text x="${mx.toFixed(1)}" y="${(my - 4).toFixed(1)}" class="edge-label">${escapeHtml(label)}</text>` +
        `</g>`,
    );
  }
  for (const agent of snapshot.agents) {
    const p = positions.get(agent.id);
    if (!p) continue;
    const color = KIND_COLORS[agent.kind] ?? "#334155";
    const name = agent.label ?? `a${agent.id}`;
    const badges = netWorthBadges(sheets, agent.id);
    const badgeText = badges
      .map((b, i) => `<text x="${p.x.toFixed(1)}" y="${(p.y + 34 + 13 * i).toFixed(1)}" class="badge">${escapeHtml(b)}</text>`)
      .join("");
    parts.push(
      `<g class="agent" data-agent="${agent.id}">` +
        `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="18" fill="${color}"/>` +
        `<text x="${p.x.toFixed(1)}" y="${(p.y + 4).toFixed(1)}" class="agent-initial">${escapeHtml(name.slice(0, 2))}</text>` +
        `<text x="${p.x.toFixed(1)}" y="${(p.y - 24).toFixed(1)}" class="agent-name">${escapeHtml(`${name} (${agent.kind})`)}</text>` +
        badgeText +
        `</g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}

export function renderHistory(history: HistoryEntry[], opsApplied: number): string {
  const items = history
    .map((h) => {
      const status = h.ok ? "ok" : `rejected (${h.code ?? "?"})`;
      const params = Object.entries(h.params)
        .map(([k, v]) => `${k}=${String(v)}`)
        .join(" ");
      return `<li class="${h.ok ? "ok" : "failed"}">${escapeHtml(h.name)} ${escapeHtml(params)} <em>${escapeHtml(status)}</em></li>`;
    })
    .join("");
  return `<p>ops applied: <strong data-ops-applied>${opsApplied}</strong></p><ol>${items}</ol>`;
}

export function renderToast(toast: string | null): string {
  if (!toast) return "";
  return `<div class="toast" role="alert">${escapeHtml(toast)}</div>`;
}

export function renderConsolidationDiff(
  before: Snapshot,
  after: Snapshot,
  beforeSheets: SheetJson[],
  afterSheets: SheetJson[],
  removedEdgeIds: number[],
  sessionId: string,
  layout: (s: Snapshot, id: string) => Map<number, Point>,
): string {
  const left = renderGraphSvg(before, beforeSheets, layout(before, sessionId), {
    highlightEdges: new Set(removedEdgeIds),
    title: "before consolidation (canceled claims highlighted)",
  });
  const right = renderGraphSvg(after, afterSheets, layout(after, sessionId), {
    title: "after consolidation",
  });
  return `<div class="diff"><div class="pane">${left}</div><div class="pane">${right}</div></div>`;
}
