/** Deterministic force-directed layout: the node positions depend only on
 * the graph structure and the session id, so a session always renders the
 * same picture (and screenshots stay stable). */

import {
  forceCenter,
  forceCollide,
  forceLink,
  forceManyBody,
  forceSimulation,
  type SimulationLinkDatum,
  type SimulationNodeDatum,
} from "d3-force";

import type { Snapshot } from "./types.js";

interface LayoutNode extends SimulationNodeDatum {
  id: number;
}

export interface Point {
  x: number;
  y: number;
}

export function hashSeed(text: string): number {
  let h = 0x811c9dc5; // FNV-1a
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function layoutGraph(
  snapshot: Snapshot,
  sessionId: string,
  width = 860,
  height = 560,
): Map<number, Point> {
  const rand = mulberry32(hashSeed(sessionId));
  const radius = Math.min(width, height) / 3;
  const nodes: LayoutNode[] = snapshot.agents.map((a, i) => {
    const angle = (2 * Math.PI * i) / Math.max(1, snapshot.agents.length) + rand() * 0.5;
    return {
      id: a.id,
      x: width / 2 + radius * Math.cos(angle) + (rand() - 0.5) * 20,
      y: height / 2 + radius * Math.sin(angle) + (rand() - 0.5) * 20,
    };
  });
  const links: SimulationLinkDatum<LayoutNode>[] = snapshot.instruments.map((inst) => ({
    source: inst.debtor,
    target: inst.creditor,
  }));
  const sim = forceSimulation(nodes)
    .randomSource(rand)
    .force("link", forceLink<LayoutNode, SimulationLinkDatum<LayoutNode>>(links)
      .id((d) => d.id)
      .distance(150))
    .force("charge", forceManyBody().strength(-420))
    .force("center", forceCenter(width / 2, height / 2))
    .force("collide", forceCollide(44))
    .stop();
  for (let i = 0; i < 200; i++) sim.tick();
  const out = new Map<number, Point>();
  for (const n of nodes) out.set(n.id, { x: n.x ?? width / 2, y: n.y ?? height / 2 });
  return out;
}
