import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, type FetchLike } from "../src/api.js";

function canned(status: number, body: unknown): FetchLike {
  return async () =>
    new Response(JSON.stringify(body), { status, headers: { "content-type": "application/json" } });
}

describe("ApiClient", () => {
  it("returns parsed payloads on 200", async () => {
    const api = new ApiClient("", canned(200, { id: "abc" }));
    expect(await api.createSession({ regime: { kind: "fiat" } })).toEqual({ id: "abc" });
  });

  it("throws ApiError carrying the engine code verbatim on 422", async () => {
    const api = new ApiClient("", canned(422, { code: "ErrRegimeViolation", message: "nope" }));
    const err = await api.applyOp("s", "create_loan", {}).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.code).toBe("ErrRegimeViolation");
    expect(err.message).toBe("nope");
  });

  it("maps 404 to an error too", async () => {
    const api = new ApiClient("", canned(404, { code: "ErrUnknownSession", message: "no session x" }));
    const err = await api.state("x").catch((e) => e);
    expect(err.code).toBe("ErrUnknownSession");
  });

  it("sends JSON bodies with the content-type header", async () => {
    let seen: RequestInit | undefined;
    const spy: FetchLike = async (_url, init) => {
      seen = init;
      return new Response("{}", { status: 200 });
    };
    await new ApiClient("", spy).applyOp("s", "tax", { amount: 3 });
    expect((seen?.headers as Record<string, string>)["content-type"]).toBe("application/json");
    expect(JSON.parse(String(seen?.body))).toEqual({ name: "tax", params: { amount: 3 } });
  });
});
