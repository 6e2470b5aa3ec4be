import { describe, expect, it } from "vitest";

import { hashSeed, layoutGraph, mulberry32 } from "../src/layout.js";
import type { Snapshot } from "../src/types.js";

const snapshot: Snapshot = {
  regime: { kind: "fiat" },
  config: {},
  currencies: ["DOM"],
  commodities: [],
  agents: [
    { id: 1, kind: "central_bank", currency: "DOM", label: "cb", commodities: {} },
    { id: 2, kind: "bank", currency: null, label: "b1", commodities: {} },
    { id: 3, kind: "nonbank", currency: null, label: "h1", commodities: {} },
  ],
  instruments: [
    { id: 1, kind: "loan", debtor: 3, creditor: 2, currency: "DOM", amount: "100", redemption: null },
    { id: 2, kind: "deposit", debtor: 2, creditor: 3, currency: "DOM", amount: "100", redemption: null },
  ],
};

describe("deterministic layout", () => {
  it("same session id gives identical positions", () => {
    const a = layoutGraph(snapshot, "session-A");
    const b = layoutGraph(snapshot, "session-A");
    expect([...a.entries()]).toEqual([...b.entries()]);
  });

  it("different session ids give different pictures", () => {
    const a = layoutGraph(snapshot, "session-A");
    const b = layoutGraph(snapshot, "session-B");
    expect(JSON.stringify([...a.entries()])).not.toBe(JSON.stringify([...b.entries()]));
  });

  it("positions every agent inside the viewport", () => {
    const positions = layoutGraph(snapshot, "session-A", 860, 560);
    expect(positions.size).toBe(3);
    for (const p of positions.values()) {
      expect(p.x).toBeGreaterThan(-100);
      expect(p.x).toBeLessThan(960);
      expect(p.y).toBeGreaterThan(-100);
      expect(p.y).toBeLessThan(660);
    }
  });

  it("mulberry32 is reproducible and hashSeed stable", () => {
    expect(hashSeed("abc")).toBe(hashSeed("abc"));
    const r1 = mulberry32(42);
    const r2 = mulberry32(42);
    expect([r1(), r1(), r1()]).toEqual([r2(), r2(), r2()]);
  });
});
