/**
 * Session state container.
 *
 * Invariants the tests pin down:
 *  - the rendered state always reflects the last server snapshot: every
 *    mutation attempt (success or engine rejection) is followed by a full
 *    state/measures/sheets refresh;
 *  - a rejected op changes nothing except the error toast, which shows the
 *    engine code verbatim;
 *  - mutations are serialized client-side: one in flight at a time;
 *  - opsApplied mirrors the server's undo depth (successes minus undos).
 */

import { ApiClient, ApiError } from "./api.js";
import type { HistoryEntry, MeasureReport, SheetJson, Snapshot } from "./types.js";

export interface ConsolidationView {
  forkId: string;
  before: Snapshot;
  after: Snapshot;
  beforeSheets: SheetJson[];
  afterSheets: SheetJson[];
  afterMeasures: MeasureReport[];
  /** instrument ids of intra-government edges that the merge cancels */
  removedEdgeIds: number[];
}

export class SessionStore {
  snapshot!: Snapshot;
  measures: MeasureReport[] = [];
  sheets: SheetJson[] = [];
  history: HistoryEntry[] = [];
  opsApplied = 0;
  toast: string | null = null;

  private queue: Promise<unknown> = Promise.resolve();
  private listeners: Array<() => void> = [];

  private constructor(
    readonly api: ApiClient,
    readonly sid: string,
  ) {}

  static async create(api: ApiClient, body: Record<string, unknown>): Promise<SessionStore> {
    const { id } = await api.createSession(body);
    return SessionStore.attach(api, id);
  }

  static async attach(api: ApiClient, sid: string): Promise<SessionStore> {
    const store = new SessionStore(api, sid);
    await store.refresh();
    return store;
  }

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** Serialize mutations: at most one request chain in flight per session. */
  private enqueue<T>(work: () => Promise<T>): Promise<T> {
    const next = this.queue.then(work, work);
    this.queue = next.catch(() => undefined);
    return next;
  }

  async refresh(): Promise<void> {
    this.snapshot = await this.api.state(this.sid);
    this.measures = await this.api.measures(this.sid);
    this.sheets = await this.api.sheets(this.sid);
    this.emit();
  }

  applyOp(name: string, params: Record<string, unknown>): Promise<HistoryEntry> {
    return this.enqueue(async () => {
      this.toast = null;
      let entry: HistoryEntry;
      try {
        await this.api.applyOp(this.sid, name, params);
        entry = { name, params, ok: true };
        this.opsApplied += 1;
      } catch (e) {
        if (!(e instanceof ApiError)) throw e;
        entry = { name, params, ok: false, code: e.code };
        this.toast = e.code; // engine code, verbatim
      }
      this.history.push(entry);
      await this.refresh();
      return entry;
    });
  }

  undo(): Promise<boolean> {
    return this.enqueue(async () => {
      this.toast = null;
      try {
        await this.api.undo(this.sid);
      } catch (e) {
        if (!(e instanceof ApiError)) throw e;
        this.toast = e.code;
        await this.refresh();
        return false;
      }
      this.opsApplied -= 1;
      this.history.push({ name: "undo", params: {}, ok: true });
      await this.refresh();
      return true;
    });
  }

  fork(): Promise<SessionStore> {
    return this.enqueue(async () => {
      const { id } = await this.api.fork(this.sid);
      return SessionStore.attach(this.api, id);
    });
  }

  /**
   * What-if consolidation: fork the session, merge the central bank and the
   * treasury on the fork, and return both views with the canceled
   * intra-government edges marked (membership only, no arithmetic).
   */
  async consolidateCompare(): Promise<ConsolidationView> {
    const before = this.snapshot;
    const cb = before.agents.find((a) => a.kind === "central_bank");
    const tsy = before.agents.find((a) => a.kind === "treasury");
    if (!cb || !tsy) {
      throw new ApiError(422, "ErrMissingAgent", "needs a central bank and a treasury");
    }
    const government = new Set([cb.id, tsy.id]);
    const removedEdgeIds = before.instruments
      .filter((i) => government.has(i.debtor) && government.has(i.creditor))
      .map((i) => i.id);
    const forked = await this.fork();
    await forked.applyOp("consolidate", { cb: cb.id, treasury: tsy.id });
    return {
      forkId: forked.sid,
      before,
      after: forked.snapshot,
      beforeSheets: this.sheets,
      afterSheets: forked.sheets,
      afterMeasures: forked.measures,
      removedEdgeIds,
    };
  }
}
