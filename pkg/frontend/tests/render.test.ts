import { describe, expect, it } from "vitest";

import { layoutGraph } from "../src/layout.js";
import {
  netWorthBadges,
  renderConsolidationDiff,
  renderGraphSvg,
  renderHistory,
  renderMeasures,
  renderToast,
} from "../src/render.js";
import type { MeasureReport, SheetJson, Snapshot } from "../src/types.js";

const snapshot: Snapshot = {
  regime: { kind: "fiat" },
  config: {},
  currencies: ["DOM"],
  commodities: [],
  agents: [
    { id: 1, kind: "bank", currency: null, label: "b1", commodities: {} },
    { id: 2, kind: "nonbank", currency: null, label: "h1", commodities: {} },
  ],
  instruments: [
    { id: 1, kind: "loan", debtor: 2, creditor: 1, currency: "DOM", amount: "100", redemption: null },
    { id: 2, kind: "deposit", debtor: 1, creditor: 2, currency: "DOM", amount: "100", redemption: null },
  ],
};

const sheets: SheetJson[] = [
  { agent: 1, unit: "DOM", assets: [["loan", "100"]], liabilities: [["deposit", "100"]], net_worth: "0" },
  { agent: 2, unit: "DOM", assets: [["deposit", "100"]], liabilities: [["loan", "100"]], net_worth: "-17" },
];

const measures: MeasureReport[] = [
  {
    currency: "DOM",
    base_money: "0",
    broad_money: "100",
    net_money: "-42",
    sector_positions: { bank: "0", nonbank: "0" },
  },
];

describe("renderMeasures", () => {
  it("prints every measure string verbatim, including negatives", () => {
    const html = renderMeasures(measures);
    expect(html).toContain('data-measure="broad_money">100<');
    expect(html).toContain('data-measure="net_money">-42<');
    expect(html).toContain('data-measure="base_money">0<');
  });

  it("escapes markup in identifiers", () => {
    const html = renderMeasures([{ ...measures[0], currency: "<DOM>" }]);
    expect(html).toContain("&lt;DOM&gt;");
    expect(html).not.toContain("<DOM>");
  });
});

describe("renderGraphSvg", () => {
  const positions = layoutGraph(snapshot, "s");

  it("draws one node per agent and one edge per instrument", () => {
    const svg = renderGraphSvg(snapshot, sheets, positions);
    expect(svg.match(/class="agent"/g)?.length).toBe(2);
    expect(svg.match(/class="edge"/g)?.length).toBe(2);
    expect(svg).toContain("loan:100 DOM");
    expect(svg).toContain("deposit:100 DOM");
  });

  it("shows net-worth badges from the sheets payload verbatim", () => {
    expect(netWorthBadges(sheets, 2)).toEqual(["DOM: -17"]);
    const svg = renderGraphSvg(snapshot, sheets, positions);
    expect(svg).toContain("DOM: -17");
  });

  it("marks highlighted edges as removed", () => {
    const svg = renderGraphSvg(snapshot, sheets, positions, { highlightEdges: new Set([1]) });
    expect(svg).toContain('class="edge removed" data-instrument="1"');
    expect(svg).toContain('class="edge" data-instrument="2"');
  });
});

describe("renderHistory / renderToast", () => {
  it("reports ops applied and failures", () => {
    const html = renderHistory(
      [
        { name: "create_loan", params: { amount: 5 }, ok: true },
        { name: "create_loan", params: { amount: 5 }, ok: false, code: "ErrRegimeViolation" },
      ],
      1,
    );
    expect(html).toContain("data-ops-applied>1<");
    expect(html).toContain("rejected (ErrRegimeViolation)");
  });

  it("toast shows the code only when set", () => {
    expect(renderToast(null)).toBe("");
    expect(renderToast("ErrRegimeViolation")).toContain("ErrRegimeViolation");
  });
});

describe("renderConsolidationDiff", () => {
  it("renders two panes and highlights the canceled claims on the left", () => {
    const after: Snapshot = { ...snapshot, instruments: [snapshot.instruments[1]] };
    const html = renderConsolidationDiff(
      snapshot,
      after,
      sheets,
      sheets,
      [1],
      "sess",
      (s, id) => layoutGraph(s, id),
    );
    expect(html.match(/class="pane"/g)?.length).toBe(2);
    const [left, right] = html.split('<div class="pane">').slice(1);
    expect(left).toContain('class="edge removed" data-instrument="1"');
    expect(right).not.toContain("removed");
  });
});
