import { describe, expect, it } from "vitest";

import { ApiError, StudioApi } from "../src/api";
import { stubFetch } from "./helpers";

describe("StudioApi", () => {
  it("creates sessions with the documented body", async () => {
    const { fetchFn, calls } = stubFetch({
      "POST /sessions": { status: 201, json: { id: "s1", log_line: "L", prompt_set: "medea" } },
    });
    const api = new StudioApi("", fetchFn);
    const summary = await api.createSession("L", "medea");
    expect(summary.id).toBe("s1");
    expect(calls[0]).toEqual({
      method: "POST",
      path: "/sessions",
      body: { log_line: "L", prompt_set: "medea" },
    });
  });

  it("addresses with spaces and colons reach the slot routes", async () => {
    const { fetchFn, calls } = stubFetch({
      "POST /sessions/s1/slots/location:The Pool Pit./generate": { json: {} },
    });
    const api = new StudioApi("", fetchFn);
    await api.generate("s1", "location:The Pool Pit.", 7);
    expect(calls[0].body).toEqual({ seed: 7 });
  });

  it("omits the seed field when none is chosen", async () => {
    const { fetchFn, calls } = stubFetch({
      "POST /sessions/s1/slots/title/generate": { json: {} },
    });
    await new StudioApi("", fetchFn).generate("s1", "title");
    expect(calls[0].body).toEqual({});
  });

  it("surfaces error bodies as ApiError with the missing slot", async () => {
    const { fetchFn } = stubFetch({
      "POST /sessions/s1/slots/dialogue:0/generate": {
        status: 409,
        json: { detail: "upstream slot 'plot' is not resolved", missing: "plot" },
      },
    });
    const api = new StudioApi("", fetchFn);
    const error = await api.generate("s1", "dialogue:0").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(409);
    expect(error.missing).toBe("plot");
  });

  it("sends the bearer token when configured", async () => {
    let seenAuth: string | null = null;
    const fetchFn = async (_input: string, init?: RequestInit) => {
      seenAuth = (init?.headers as Record<string, string>)?.["Authorization"] ?? null;
      return new Response("{}", { status: 200 });
    };
    await new StudioApi("", fetchFn, "tok").promptSets();
    expect(seenAuth).toBe("Bearer tok");
  });

  it("fetches the export as plain text", async () => {
    const { fetchFn } = stubFetch({
      "GET /sessions/s1/export": { text: "TITLE\n\nCHARACTERS\n" },
    });
    const text = await new StudioApi("", fetchFn).exportText("s1");
    expect(text).toBe("TITLE\n\nCHARACTERS\n");
  });

  it("posts the seed policy for full generation", async () => {
    const { fetchFn, calls } = stubFetch({
      "POST /sessions/s1/generate_full": {
        status: 202,
        json: { id: "j1", session_id: "s1", status: "queued", error: null, failed_slot: null },
      },
    });
    const job = await new StudioApi("", fetchFn).generateFull("s1", 7);
    expect(job.status).toBe("queued");
    expect(calls[0].body).toEqual({ seed_policy: { base_seed: 7, parallel: true } });
  });
});
