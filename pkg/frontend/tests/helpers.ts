// Stub transport: routes "METHOD /path" to canned responses and records
// every request so tests can assert on the traffic.

import { StudioApi } from "../src/api";
import { StudioStore, type StoreOptions } from "../src/store";
import type { EditReportOut, SessionState } from "../src/types";

import sessionFixtureJson from "./fixtures/session.json";
import metricsFixtureJson from "./fixtures/metrics.json";

export const sessionFixture = sessionFixtureJson as unknown as SessionState;
export const metricsFixture = metricsFixtureJson as unknown as EditReportOut[];

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export interface StubRoute {
  status?: number;
  json?: unknown;
  text?: string;
}

export type RouteTable = Record<string, StubRoute | ((call: RecordedCall) => StubRoute)>;

export function stubFetch(routes: RouteTable) {
  const calls: RecordedCall[] = [];
  const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const path = decodeURIComponent(input);
    const call: RecordedCall = {
      method,
      path,
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    };
    calls.push(call);
    const route = routes[`${method} ${path}`];
    if (!route) {
      return new Response(JSON.stringify({ detail: `no stub for ${method} ${path}` }), {
        status: 404,
        headers: { "Content-Type": "application/json" },
      });
    }
    const resolved = typeof route === "function" ? route(call) : route;
    const status = resolved.status ?? 200;
    if (resolved.text !== undefined) {
      return new Response(resolved.text, { status, headers: { "Content-Type": "text/plain" } });
    }
    return new Response(JSON.stringify(resolved.json ?? {}), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

export function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export function fixtureRoutes(
  session: SessionState = sessionFixture,
  metrics: EditReportOut[] = metricsFixture,
): RouteTable {
  return {
    [`GET /sessions/${session.id}`]: { json: session },
    [`GET /sessions/${session.id}/metrics`]: { json: metrics },
  };
}

export async function loadedStore(
  routes: RouteTable = fixtureRoutes(),
  options: StoreOptions = {},
): Promise<{ store: StudioStore; calls: RecordedCall[] }> {
  const { fetchFn, calls } = stubFetch(routes);
  const store = new StudioStore(new StudioApi("", fetchFn), {
    confirmFn: () => true,
    ...options,
  });
  await store.load(sessionFixture.id);
  return { store, calls };
}

export function emptySession(): SessionState {
  return {
    id: "fresh",
    log_line: "A fresh tale.",
    prompt_set: "medea",
    slots: [
      emptySlot("title", "title"),
      emptySlot("characters", "characters"),
      { ...emptySlot("plot", "plot"), upstream_missing: "characters" },
    ],
    scenes: [],
    locations: [],
    history_length: 1,
  };
}

function emptySlot(address: string, kind: string) {
  return {
    address,
    kind,
    key: "",
    candidates: [],
    accepted: null,
    edited_text: null,
    provenance: "generated" as const,
    resolved_text: null,
    stale: false,
    upstream_missing: null as string | null,
  };
}
