/**
 * Typed client for the review API. Every failure becomes an ApiError: HTTP
 * error bodies keep their machine-readable code, transport failures get the
 * code "unreachable" and status 0.
 */

import type {
  CaseListResponse,
  CaseResponse,
  Decision,
  ErrorBody,
  MetricsResponse,
  RejectReasonsResponse,
  RejectReasonView,
} from './types.js';

export type QueueFilter = 'pending' | 'resolved' | 'all';

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
    this.code = code;
  }
}

function asErrorBody(payload: unknown): ErrorBody | null {
  if (
    typeof payload === 'object' &&
    payload !== null &&
    typeof (payload as ErrorBody).code === 'string' &&
    typeof (payload as ErrorBody).message === 'string'
  ) {
    return payload as ErrorBody;
  }
  return null;
}

export class ReviewApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (error) {
      throw new ApiError(0, 'unreachable', `cannot reach the review API at ${this.baseUrl}: ${String(error)}`);
    }
    const payload: unknown = await response.json().catch(() => null);
    if (!response.ok) {
      const body = asErrorBody(payload);
      throw new ApiError(
        response.status,
        body?.code ?? `http_${response.status}`,
        body?.message ?? `${response.status} ${response.statusText}`,
      );
    }
    return payload as T;
  }

  listCases(status: QueueFilter = 'pending', offset = 0, limit = 100): Promise<CaseListResponse> {
    const query = new URLSearchParams({ status, offset: String(offset), limit: String(limit) });
    return this.request<CaseListResponse>(`/cases?${query.toString()}`);
  }

  getCase(caseId: string): Promise<CaseResponse> {
    return this.request<CaseResponse>(`/cases/${encodeURIComponent(caseId)}`);
  }

  decide(caseId: string, decision: Decision, reviewer: string, reason?: RejectReasonView): Promise<CaseResponse> {
    return this.request<CaseResponse>(`/cases/${encodeURIComponent(caseId)}/decision`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ decision, reviewer, reason: reason ?? null }),
    });
  }

  reprocess(caseId: string, reviewer: string): Promise<CaseResponse> {
    return this.request<CaseResponse>(`/cases/${encodeURIComponent(caseId)}/reprocess`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ reviewer }),
    });
  }

  metrics(): Promise<MetricsResponse> {
    return this.request<MetricsResponse>('/metrics');
  }

  rejectReasons(): Promise<RejectReasonsResponse> {
    return this.request<RejectReasonsResponse>('/schema/reject-reasons');
  }
}
