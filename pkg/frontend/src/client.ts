// HTTP/JSON client for the local rating service. Every response is an
// envelope {"ok": bool, ...}; a false envelope carries {error: {code,
// message}} and is surfaced as a ServiceError. Transport failures (service
// unreachable) propagate as whatever the fetch implementation throws, so
// callers can distinguish "server said no" from "no server".

import type { Cursor, FeatureVector, Mode, RatingEventBody, VAScore } from "./types";

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export interface CommittedRating {
  stimulus_id: string;
  cursor: Cursor;
  fv: FeatureVector;
  va: VAScore;
}

export interface SessionSummary {
  session_id: string;
  subject_id: string;
  method: string;
  mode: Mode;
  cursor: Cursor;
  stimulus_id: string | null;
  committed: CommittedRating | null;
  events_logged: number;
  protocol_errors: number;
  finalized: boolean;
  /** the session's clock floor; resumed clients must not stamp below it */
  last_t_mono: number;
}

export interface Interpolation {
  cursor: Cursor;
  fv: FeatureVector;
  va: VAScore;
}

export interface CurrentReadout extends Interpolation {
  mode: Mode;
  stimulus_id: string | null;
}

export interface FinalizeResult {
  committed: CommittedRating;
  events_logged: number;
  protocol_errors: number;
}

export interface CreateSessionRequest {
  subject_id: string;
  method: string;
  session_id?: string;
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request(method: "GET" | "POST", path: string, body?: unknown): Promise<any> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const data = await response.json();
    if (!data.ok) {
      const err = data.error ?? { code: "unknown", message: "malformed error envelope" };
      throw new ServiceError(response.status, err.code, err.message);
    }
    return data;
  }

  async createSession(req: CreateSessionRequest): Promise<SessionSummary> {
    const data = await this.request("POST", "/sessions", req);
    return data.session;
  }

  async getSession(sessionId: string): Promise<SessionSummary> {
    const data = await this.request("GET", `/sessions/${sessionId}`);
    return data.session;
  }

  /** Post one event; resolves to the session state after the transition. */
  async postEvent(sessionId: string, event: RatingEventBody): Promise<SessionSummary> {
    const data = await this.request("POST", `/sessions/${sessionId}/events`, event);
    return data.state;
  }

  /** Engine interpolation at the session's current cursor (live VA readout). */
  async getCurrent(sessionId: string): Promise<CurrentReadout> {
    const data = await this.request("GET", `/sessions/${sessionId}/current`);
    const { ok, ...readout } = data;
    return readout as CurrentReadout;
  }

  async finalize(sessionId: string): Promise<FinalizeResult> {
    const data = await this.request("POST", `/sessions/${sessionId}/finalize`);
    const { ok, ...result } = data;
    return result as FinalizeResult;
  }

  async interpolate(r: number, phi: number): Promise<Interpolation> {
    const data = await this.request("GET", `/interpolate?r=${r}&phi=${phi}`);
    const { ok, ...interp } = data;
    return interp as Interpolation;
  }

  async getMap(): Promise<unknown> {
    const data = await this.request("GET", "/map");
    return data.map;
  }
}

/** Round a score the way the on-screen readout shows it (two decimals). */
export function displayScore(value: number): string {
  return value.toFixed(2);
}

/** Half of the last displayed digit: agreement tolerance for readouts. */
export const DISPLAY_ROUNDING = 0.005;
