/** Thin client for the session service. Every call goes through a Transport
 * so tests can capture or fake the wire without a server. */

import type { Cohort, ErrorEnvelope, SessionView } from "./types.js";

export interface WireRequest {
  method: "GET" | "POST";
  url: string;
  body?: unknown;
}

export interface WireResponse {
  status: number;
  text: string;
}

export interface Transport {
  send(req: WireRequest): Promise<WireResponse>;
}

type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<{ status: number; text(): Promise<string> }>;

export class FetchTransport implements Transport {
  constructor(private readonly fetchFn: FetchLike = fetch) {}

  async send(req: WireRequest): Promise<WireResponse> {
    const init: Parameters<FetchLike>[1] = { method: req.method };
    if (req.body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(req.body);
    }
    const resp = await this.fetchFn(req.url, init);
    return { status: resp.status, text: await resp.text() };
  }
}

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

function raiseFor(resp: WireResponse): never {
  let code = "unknown";
  let message = resp.text;
  try {
    const env = JSON.parse(resp.text) as ErrorEnvelope;
    if (env && env.error) {
      code = env.error.code;
      message = env.error.message;
    }
  } catch {
    // non-JSON error body; keep the raw text
  }
  throw new ApiError(resp.status, code, message);
}

export class ApiClient {
  readonly base: string;

  constructor(base: string, readonly transport: Transport) {
    this.base = base.replace(/\/+$/, "");
  }

  private async json<T>(req: WireRequest, okStatus: number): Promise<T> {
    const resp = await this.transport.send(req);
    if (resp.status !== okStatus) raiseFor(resp);
    return JSON.parse(resp.text) as T;
  }

  private async text(req: WireRequest): Promise<string> {
    const resp = await this.transport.send(req);
    if (resp.status !== 200) raiseFor(resp);
    return resp.text;
  }

  createSession(prompt: string, cohort?: Cohort): Promise<SessionView> {
    const body: Record<string, unknown> = { prompt };
    if (cohort !== undefined) body.cohort = cohort;
    return this.json({ method: "POST", url: `${this.base}/sessions`, body }, 201);
  }

  getState(id: string): Promise<SessionView> {
    return this.json({ method: "GET", url: `${this.base}/sessions/${id}` }, 200);
  }

  act(id: string, action: string, payload?: Record<string, unknown>): Promise<SessionView> {
    const body: Record<string, unknown> = { action };
    if (payload !== undefined) body.payload = payload;
    return this.json(
      { method: "POST", url: `${this.base}/sessions/${id}/actions`, body },
      200,
    );
  }

  finish(id: string): Promise<string> {
    return this.text({ method: "POST", url: `${this.base}/sessions/${id}/finish` });
  }

  exportText(id: string): Promise<string> {
    return this.text({ method: "GET", url: `${this.base}/sessions/${id}/export` });
  }

  logLines(id: string): Promise<string> {
    return this.text({ method: "GET", url: `${this.base}/sessions/${id}/log` });
  }
}
