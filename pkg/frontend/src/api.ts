// Typed client for the studio service. The fetch function and base URL
// are injectable so tests can run against a stubbed transport.

import type {
  CandidateOut,
  EditReportOut,
  JobOut,
  PromptSetsOut,
  SessionState,
  SessionSummary,
  SlotOut,
} from "./types";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly missing: string | string[] | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class StudioApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    private readonly authToken: string | null = null,
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.authToken) headers["Authorization"] = `Bearer ${this.authToken}`;
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = `${response.status}`;
      let missing: string | string[] | null = null;
      try {
        const payload = await response.json();
        if (payload && typeof payload.detail === "string") detail = payload.detail;
        if (payload && payload.missing !== undefined) missing = payload.missing;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(detail, response.status, missing);
    }
    return response;
  }

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.request(method, path, body);
    return (await response.json()) as T;
  }

  createSession(logLine: string, promptSet: string): Promise<SessionSummary> {
    return this.json("POST", "/sessions", { log_line: logLine, prompt_set: promptSet });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.json("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  generate(sessionId: string, address: string, seed?: number): Promise<CandidateOut> {
    return this.json(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/slots/${encodeURIComponent(address)}/generate`,
      seed === undefined ? {} : { seed },
    );
  }

  continueSlot(sessionId: string, address: string): Promise<CandidateOut> {
    return this.json(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/slots/${encodeURIComponent(address)}/continue`,
      {},
    );
  }

  edit(sessionId: string, address: string, text: string): Promise<SlotOut> {
    return this.json(
      "PUT",
      `/sessions/${encodeURIComponent(sessionId)}/slots/${encodeURIComponent(address)}/edit`,
      { text },
    );
  }

  accept(sessionId: string, address: string, candidateIndex: number): Promise<SlotOut> {
    return this.json(
      "PUT",
      `/sessions/${encodeURIComponent(sessionId)}/slots/${encodeURIComponent(address)}/accept`,
      { candidate_index: candidateIndex },
    );
  }

  generateFull(sessionId: string, baseSeed: number, parallel = true): Promise<JobOut> {
    return this.json("POST", `/sessions/${encodeURIComponent(sessionId)}/generate_full`, {
      seed_policy: { base_seed: baseSeed, parallel },
    });
  }

  getJob(jobId: string): Promise<JobOut> {
    return this.json("GET", `/jobs/${encodeURIComponent(jobId)}`);
  }

  metrics(sessionId: string): Promise<EditReportOut[]> {
    return this.json("GET", `/sessions/${encodeURIComponent(sessionId)}/metrics`);
  }

  async exportText(sessionId: string): Promise<string> {
    const response = await this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/export`);
    return await response.text();
  }

  promptSets(): Promise<PromptSetsOut> {
    return this.json("GET", "/prompt_sets");
  }
}
