/**
 * Wire types for the review API. Field names mirror the JSON bodies exactly;
 * every success body carries a `schema` version field and every error body
 * is `{code, message}`.
 */

import type { NameDiff } from './diff.js';

export type CaseStatus = 'pending' | 'resolved';

export type Decision = 'Accepted' | 'Rejected';

export interface CaseSummary {
  case_id: string;
  declared_name: string;
  country: string;
  official_name: string | null;
  previous_names: string[];
  scores: Record<string, number>;
  verdicts: Record<string, string>;
  status: CaseStatus;
  enqueued_at: string;
  resolution: string | null;
  assigned_code: string | null;
}

export interface EntityRecordView {
  country: string;
  company_name: string;
  entity_app: string;
  national_identifier: string;
  identifier_type: string;
  lei: string;
  sector: string;
  legal_form_code: string;
  legal_form_abbreviation: string;
}

export interface RejectReasonView {
  kind: string;
  detail: string;
}

export interface LegalFormVerdictView {
  outcome: string;
  detail: string;
}

export interface AuditEventView {
  timestamp: string;
  action: string;
  reviewer: string;
  decision: string | null;
  reason: RejectReasonView | null;
  note: string;
}

export interface CaseDetail extends CaseSummary {
  record: EntityRecordView;
  reject_reasons: RejectReasonView[];
  legal_form_verdict: LegalFormVerdictView | null;
  raw_responses: Record<string, string>;
  audit: AuditEventView[];
}

export interface CaseListResponse {
  schema: number;
  total: number;
  cases: CaseSummary[];
}

export interface CaseResponse {
  schema: number;
  case: CaseDetail;
}

export interface MetricsRowView {
  method_name: string;
  accuracy: number;
  precision: number;
  recall: number;
  f1: number;
  roc_auc: number;
  fpr: number;
  degenerate: string[];
}

export interface MetricsResponse {
  schema: number;
  rows: MetricsRowView[];
}

export interface RejectReasonsResponse {
  schema: number;
  reasons: string[];
}

export interface ErrorBody {
  code: string;
  message: string;
}

/**
 * A case as the console displays it: the summary plus the client-computed
 * character diff between the declared and official names (null when there
 * is no official name to compare against) and the lowest similarity score
 * (null when no backend produced a score).
 */
export interface ViewCase extends CaseSummary {
  diff: NameDiff | null;
  minScore: number | null;
}

export function toViewCase(summary: CaseSummary, makeDiff: (a: string, b: string) => NameDiff): ViewCase {
  const scores = Object.values(summary.scores);
  return {
    ...summary,
    diff: summary.official_name === null ? null : makeDiff(summary.declared_name, summary.official_name),
    minScore: scores.length === 0 ? null : Math.min(...scores),
  };
}
