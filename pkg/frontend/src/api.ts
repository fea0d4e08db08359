/** Typed client for the session service. */

import type {
  AnswerResult,
  GestureResult,
  ProgressSummary,
  SessionCreated,
  StackPayload,
  UiConfig,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
  ) {
    super(`service returned ${status}`);
  }
}

export interface StackApi {
  createSession(studentId: string): Promise<SessionCreated>;
  stack(sessionId: string): Promise<StackPayload>;
  gesture(
    sessionId: string,
    cardId: string,
    kind: "drag" | "release" | "tap",
    dx?: number,
    vx?: number,
    token?: string,
  ): Promise<GestureResult>;
  answer(
    sessionId: string,
    cardId: string,
    correct: boolean,
    elapsedS: number,
  ): Promise<AnswerResult>;
  progress(sessionId: string): Promise<ProgressSummary>;
  config(): Promise<UiConfig>;
}

export class ApiClient implements StackApi {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await resp.json().catch(() => null);
    if (!resp.ok) {
      throw new ApiError(resp.status, payload);
    }
    return payload as T;
  }

  createSession(studentId: string): Promise<SessionCreated> {
    return this.request("POST", "/sessions", { student_id: studentId });
  }

  stack(sessionId: string): Promise<StackPayload> {
    return this.request("GET", `/sessions/${sessionId}/stack`);
  }

  gesture(
    sessionId: string,
    cardId: string,
    kind: "drag" | "release" | "tap",
    dx = 0,
    vx = 0,
    token?: string,
  ): Promise<GestureResult> {
    return this.request("POST", `/sessions/${sessionId}/gesture`, {
      card_id: cardId,
      kind,
      dx,
      vx,
      token,
    });
  }

  answer(
    sessionId: string,
    cardId: string,
    correct: boolean,
    elapsedS: number,
  ): Promise<AnswerResult> {
    return this.request("POST", `/sessions/${sessionId}/answer`, {
      card_id: cardId,
      correct,
      elapsed_s: elapsedS,
    });
  }

  progress(sessionId: string): Promise<ProgressSummary> {
    return this.request("GET", `/sessions/${sessionId}/progress`);
  }

  config(): Promise<UiConfig> {
    return this.request("GET", "/config");
  }
}
