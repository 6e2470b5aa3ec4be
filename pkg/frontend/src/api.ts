/** Typed client for the session API; the fetch implementation is injectable
 * so tests can replay recorded traffic. */

import type { MeasureReport, OpResponse, SheetJson, Snapshot } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchImpl(this.baseUrl + path, init);
    const text = await res.text();
    let payload: unknown = null;
    if (text) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = null;
      }
    }
    if (!res.ok) {
      const err = (payload ?? {}) as { code?: string; message?: string };
      throw new ApiError(res.status, err.code ?? `ErrHttp${res.status}`, err.message ?? res.statusText);
    }
    return payload as T;
  }

  createSession(body: Record<string, unknown>): Promise<{ id: string }> {
    return this.request("POST", "/sessions", body);
  }

  state(sid: string): Promise<Snapshot> {
    return this.request("GET", `/sessions/${sid}/state`);
  }

  measures(sid: string): Promise<MeasureReport[]> {
    return this.request("GET", `/sessions/${sid}/measures`);
  }

  sheets(sid: string): Promise<SheetJson[]> {
    return this.request("GET", `/sessions/${sid}/sheets`);
  }

  async dotText(sid: string): Promise<string> {
    const res = await this.fetchImpl(`${this.baseUrl}/sessions/${sid}/dot`, { method: "GET" });
    if (!res.ok) throw new ApiError(res.status, `ErrHttp${res.status}`, res.statusText);
    return res.text();
  }

  applyOp(sid: string, name: string, params: Record<string, unknown>): Promise<OpResponse> {
    return this.request("POST", `/sessions/${sid}/ops`, { name, params });
  }

  undo(sid: string): Promise<{ ok: boolean; measures: MeasureReport[] }> {
    return this.request("POST", `/sessions/${sid}/undo`);
  }

  redo(sid: string): Promise<{ ok: boolean; measures: MeasureReport[] }> {
    return this.request("POST", `/sessions/${sid}/redo`);
  }

  fork(sid: string): Promise<{ id: string }> {
    return this.request("POST", `/sessions/${sid}/fork`);
  }

  remove(sid: string): Promise<{ ok: boolean }> {
    return this.request("DELETE", `/sessions/${sid}`);
  }
}
