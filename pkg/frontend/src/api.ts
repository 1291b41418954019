/** Thin typed client for the explanation service. */

import { ExplainResponse, QueryDraft, SolveResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body.error ?? "error", body.message ?? "request failed");
    }
    return body as T;
  }

  createInstance(family: string, content: string, name: string): Promise<{ session_id: string }> {
    return this.request("/instances", {
      method: "POST",
      body: JSON.stringify({ family, content, name }),
    });
  }

  solve(sessionId: string, timeLimit?: number): Promise<SolveResponse> {
    return this.request(`/sessions/${sessionId}/solve`, {
      method: "POST",
      body: JSON.stringify(timeLimit ? { time_limit: timeLimit } : {}),
    });
  }

  explain(sessionId: string, query: QueryDraft, algorithm: string): Promise<ExplainResponse> {
    return this.request(`/sessions/${sessionId}/explain`, {
      method: "POST",
      body: JSON.stringify({ query, algorithm }),
    });
  }

  history(sessionId: string): Promise<unknown[]> {
    return this.request(`/sessions/${sessionId}/history`);
  }
}
