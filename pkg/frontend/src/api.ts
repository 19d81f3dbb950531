/** Typed client for the screening service's HTTP API (no extra endpoints). */

import type { Ack, Alert, Report, TrialRecord } from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function readError(resp: Response): Promise<ApiError> {
  let code = 'unknown';
  let message = resp.statusText;
  try {
    const body = await resp.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep defaults
  }
  return new ApiError(resp.status, code, message);
}

export class ScreeningApi {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async postTrial(childId: string, sessionId: string, trial: TrialRecord): Promise<Ack> {
    const url = `${this.baseUrl}/v1/children/${encodeURIComponent(childId)}/sessions/${encodeURIComponent(sessionId)}/trials`;
    const resp = await this.fetchImpl(url, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(trial),
    });
    if (!resp.ok) throw await readError(resp);
    return (await resp.json()) as Ack;
  }

  async getReport(childId: string): Promise<Report> {
    const resp = await this.fetchImpl(
      `${this.baseUrl}/v1/children/${encodeURIComponent(childId)}/report`,
    );
    if (!resp.ok) throw await readError(resp);
    return (await resp.json()) as Report;
  }

  async getAlerts(childId: string, sinceMs: number): Promise<Alert[]> {
    const resp = await this.fetchImpl(
      `${this.baseUrl}/v1/children/${encodeURIComponent(childId)}/alerts?since=${sinceMs}`,
    );
    if (!resp.ok) throw await readError(resp);
    const body = await resp.json();
    return body.alerts as Alert[];
  }

  async health(): Promise<boolean> {
    try {
      const resp = await this.fetchImpl(`${this.baseUrl}/v1/healthz`);
      return resp.ok;
    } catch {
      return false;
    }
  }
}
