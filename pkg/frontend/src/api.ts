// Thin typed client for the inference API. A fetch implementation is
// injectable so tests can substitute canned payloads.

import type {
  PosteriorReport,
  ScenarioBody,
  SensitivityResponse,
  SessionCreated,
  SessionInfo,
  RatingScalesResponse,
  WhatIfResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorType: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    let body: unknown = null;
    try {
      body = text ? JSON.parse(text) : null;
    } catch {
      body = null;
    }
    if (!response.ok) {
      const err = (body as { error?: { type?: string; message?: string } })?.error;
      throw new ApiError(
        response.status,
        err?.type ?? "HttpError",
        err?.message ?? `HTTP ${response.status}`,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  createScenarioSession(scenario: ScenarioBody): Promise<SessionCreated> {
    return this.post("/sessions", { scenario });
  }

  getSession(sessionId: string): Promise<SessionInfo> {
    return this.request(`/sessions/${sessionId}`);
  }

  predict(sessionId: string): Promise<PosteriorReport> {
    return this.request(`/sessions/${sessionId}/predict`);
  }

  whatIf(sessionId: string, node: string, state: string): Promise<WhatIfResponse> {
    return this.post(`/sessions/${sessionId}/whatif`, { node, state });
  }

  sensitivity(
    sessionId: string,
    target: string,
    inputs?: string[],
  ): Promise<SensitivityResponse> {
    const params = new URLSearchParams({ target });
    if (inputs && inputs.length) {
      params.set("inputs", inputs.join(","));
    }
    return this.request(`/sessions/${sessionId}/sensitivity?${params.toString()}`);
  }

  ratingScales(): Promise<RatingScalesResponse> {
    return this.request("/rating-scales");
  }
}
