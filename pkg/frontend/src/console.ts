/**
 * The review console: a queue of pending cases, a case detail view with the
 * declared and official names diffed character by character, and decision
 * controls (Accept, Reject-with-reason, reprocess).
 *
 * All state lives server-side — every view renders from a fresh fetch, so a
 * full page reload reproduces the same queue. Concurrent reviewers are
 * handled by the API's conflict responses (409), never by client locking.
 * There is deliberately no Doubtful control: a reviewer must commit.
 */

import { ApiError, ReviewApiClient } from './api.js';
import { charDiff, type DiffSpan } from './diff.js';
import type { CaseDetail, CaseSummary, RejectReasonView, ViewCase } from './types.js';
import { toViewCase } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className !== undefined) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function formatScore(value: number | null): string {
  return value === null ? '—' : value.toFixed(3);
}

/** Render diff spans into a container; changed runs become <mark> elements. */
function renderSpans(container: HTMLElement, spans: DiffSpan[]): void {
  for (const span of spans) {
    if (span.changed) {
      container.append(el('mark', undefined, span.text));
    } else {
      container.append(document.createTextNode(span.text));
    }
  }
}

export class ReviewConsole {
  private readonly root: HTMLElement;
  private readonly client: ReviewApiClient;
  private reasons: string[] = [];
  private banner: HTMLElement;
  private notice: HTMLElement;
  private view: HTMLElement;
  private reviewerInput: HTMLInputElement;
  private lastView: () => Promise<void>;

  constructor(root: HTMLElement, client: ReviewApiClient) {
    this.root = root;
    this.client = client;
    this.lastView = () => this.showQueue();

    const header = el('header', 'console-header');
    header.append(el('h1', undefined, 'Review console'));
    const nav = el('nav');
    const queueButton = el('button', 'nav-queue', 'Queue');
    queueButton.type = 'button';
    queueButton.addEventListener('click', () => void this.showQueue());
    const metricsButton = el('button', 'nav-metrics', 'Metrics');
    metricsButton.type = 'button';
    metricsButton.addEventListener('click', () => void this.showMetrics());
    nav.append(queueButton, metricsButton);
    header.append(nav);

    const reviewerLabel = el('label', 'reviewer-label', 'Reviewer ');
    this.reviewerInput = el('input', 'reviewer');
    this.reviewerInput.type = 'text';
    this.reviewerInput.placeholder = 'your name';
    reviewerLabel.append(this.reviewerInput);
    header.append(reviewerLabel);

    this.banner = el('div', 'banner');
    this.banner.hidden = true;
    this.notice = el('div', 'notice');
    this.notice.hidden = true;
    this.view = el('main', 'view');

    this.root.replaceChildren(header, this.banner, this.notice, this.view);
  }

  /** Load the reject-reason vocabulary and show the queue. */
  async start(): Promise<void> {
    try {
      this.reasons = (await this.client.rejectReasons()).reasons;
    } catch {
      // Not fatal here: the queue can still render, and a failing API will
      // surface its own banner the moment the queue is fetched.
    }
    await this.showQueue();
  }

  get reviewer(): string {
    return this.reviewerInput.value.trim();
  }

  // -- banners ---------------------------------------------------------------

  private showBanner(message: string): void {
    this.banner.replaceChildren(el('span', 'banner-message', message));
    const retry = el('button', 'retry', 'Retry');
    retry.type = 'button';
    retry.addEventListener('click', () => {
      this.clearBanner();
      void this.lastView();
    });
    this.banner.append(' ', retry);
    this.banner.hidden = false;
  }

  private clearBanner(): void {
    this.banner.hidden = true;
    this.banner.replaceChildren();
  }

  private showNotice(message: string, kind: 'info' | 'conflict' = 'info'): void {
    this.notice.className = kind === 'conflict' ? 'notice conflict' : 'notice';
    this.notice.textContent = message;
    this.notice.hidden = false;
  }

  private clearNotice(): void {
    this.notice.hidden = true;
    this.notice.textContent = '';
  }

  // -- queue view --------------------------------------------------------------

  async showQueue(): Promise<void> {
    this.lastView = () => this.showQueue();
    this.clearBanner();
    let cases: ViewCase[];
    let total: number;
    try {
      const page = await this.client.listCases('pending');
      total = page.total;
      cases = page.cases.map((summary) => toViewCase(summary, charDiff));
    } catch (error) {
      this.showBanner(describeError(error));
      return;
    }

    const heading = el('h2', undefined, `Pending cases (${total})`);
    if (cases.length === 0) {
      const empty = el('p', 'empty-state', 'No pending cases. The queue is clear.');
      this.view.replaceChildren(heading, empty);
      return;
    }

    const table = el('table', 'queue');
    const head = el('thead');
    const headRow = el('tr');
    for (const title of ['Case', 'Declared name', 'Official name', 'Lowest score', '']) {
      headRow.append(el('th', undefined, title));
    }
    head.append(headRow);
    const body = el('tbody');
    for (const viewCase of cases) {
      body.append(this.queueRow(viewCase));
    }
    table.append(head, body);
    this.view.replaceChildren(heading, table);
  }

  private queueRow(viewCase: ViewCase): HTMLTableRowElement {
    const row = el('tr');
    row.dataset['caseId'] = viewCase.case_id;
    row.append(el('td', 'case-id', viewCase.case_id));
    row.append(el('td', 'declared', viewCase.declared_name));
    row.append(el('td', 'official', viewCase.official_name ?? '(no official name)'));
    row.append(el('td', 'min-score', formatScore(viewCase.minScore)));

    const actions = el('td', 'actions');
    const open = el('button', 'open-case', 'Open');
    open.type = 'button';
    open.addEventListener('click', () => void this.showDetail(viewCase.case_id));
    const accept = el('button', 'accept-inline', 'Accept');
    accept.type = 'button';
    accept.addEventListener('click', () => void this.acceptFromQueue(viewCase.case_id, row));
    actions.append(open, ' ', accept);
    row.append(actions);
    return row;
  }

  /** One-click Accept: remove the row optimistically, roll back via refresh. */
  private async acceptFromQueue(caseId: string, row: HTMLTableRowElement): Promise<void> {
    this.clearNotice();
    if (this.reviewer === '') {
      this.showNotice('Enter your reviewer name before deciding.', 'conflict');
      return;
    }
    row.remove();
    try {
      const decided = (await this.client.decide(caseId, 'Accepted', this.reviewer)).case;
      this.showNotice(`Case ${caseId} accepted — code ${decided.assigned_code ?? '(pending)'}.`);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.showNotice(`Case ${caseId} was already resolved by another reviewer.`, 'conflict');
      } else {
        this.showBanner(describeError(error));
      }
    }
    await this.showQueue();
  }

  // -- detail view -------------------------------------------------------------

  async showDetail(caseId: string): Promise<void> {
    this.lastView = () => this.showDetail(caseId);
    this.clearBanner();
    this.clearNotice();
    let detail: CaseDetail;
    try {
      detail = (await this.client.getCase(caseId)).case;
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        this.renderNotFound(caseId);
        return;
      }
      this.showBanner(describeError(error));
      return;
    }

    const back = el('button', 'back', '← Back to queue');
    back.type = 'button';
    back.addEventListener('click', () => void this.showQueue());

    const heading = el('h2', undefined, `Case ${detail.case_id} — ${detail.declared_name}`);
    const status = el(
      'p',
      'case-status',
      detail.status === 'pending'
        ? `Status: pending (enqueued ${detail.enqueued_at})`
        : `Status: resolved — ${detail.resolution ?? ''}${detail.assigned_code ? `, code ${detail.assigned_code}` : ''}`,
    );

    this.view.replaceChildren(
      back,
      heading,
      status,
      this.namesSection(detail),
      this.signalsSection(detail),
      this.decisionSection(detail),
      this.auditSection(detail),
    );
  }

  private renderNotFound(caseId: string): void {
    const panel = el('div', 'not-found');
    panel.append(el('h2', undefined, 'Case not found'));
    panel.append(el('p', undefined, `No case ${caseId} exists in this run.`));
    const back = el('button', 'back', '← Back to queue');
    back.type = 'button';
    back.addEventListener('click', () => void this.showQueue());
    panel.append(back);
    this.view.replaceChildren(panel);
  }

  private namesSection(detail: CaseDetail): HTMLElement {
    const section = el('section', 'names');
    section.append(el('h3', undefined, 'Names'));

    if (detail.official_name === null && detail.previous_names.length === 0) {
      const declared = el('p', 'declared-name', '');
      declared.append(el('strong', undefined, 'Declared: '), detail.declared_name);
      section.append(declared);
      section.append(
        el(
          'div',
          'no-reference',
          'No reference found — no official or previous name is on file for this case.',
        ),
      );
      return section;
    }

    const viewCase = toViewCase(detail, charDiff);
    const declaredLine = el('p', 'declared-name');
    declaredLine.append(el('strong', undefined, 'Declared: '));
    const officialLine = el('p', 'official-name');
    officialLine.append(el('strong', undefined, 'Official: '));
    if (viewCase.diff === null) {
      declaredLine.append(detail.declared_name);
      officialLine.append('(no official name)');
    } else {
      const declaredSpans = el('span', 'diff-left');
      renderSpans(declaredSpans, viewCase.diff.left);
      declaredLine.append(declaredSpans);
      const officialSpans = el('span', 'diff-right');
      renderSpans(officialSpans, viewCase.diff.right);
      officialLine.append(officialSpans);
    }
    section.append(declaredLine, officialLine);

    if (detail.previous_names.length > 0) {
      const previous = el('p', 'previous-names');
      previous.append(el('strong', undefined, 'Previous names: '), detail.previous_names.join('; '));
      section.append(previous);
    }
    return section;
  }

  private signalsSection(detail: CaseDetail): HTMLElement {
    const section = el('section', 'signals');
    section.append(el('h3', undefined, 'Scores and verdicts'));

    const backends = [...new Set([...Object.keys(detail.scores), ...Object.keys(detail.verdicts)])].sort();
    if (backends.length === 0) {
      section.append(el('p', 'no-signals', 'No backend was consulted for this case.'));
    } else {
      const table = el('table', 'signals-table');
      const head = el('thead');
      const headRow = el('tr');
      for (const title of ['Backend', 'Score', 'Verdict']) {
        headRow.append(el('th', undefined, title));
      }
      head.append(headRow);
      const body = el('tbody');
      for (const backend of backends) {
        const row = el('tr');
        row.append(el('td', undefined, backend));
        row.append(el('td', undefined, formatScore(detail.scores[backend] ?? null)));
        row.append(el('td', undefined, detail.verdicts[backend] ?? '—'));
        body.append(row);
      }
      table.append(head, body);
      section.append(table);
    }

    if (detail.legal_form_verdict !== null) {
      const verdict = detail.legal_form_verdict;
      section.append(
        el(
          'p',
          'legal-form',
          `Legal form: ${verdict.outcome}${verdict.detail ? ` (${verdict.detail})` : ''}`,
        ),
      );
    }
    if (detail.reject_reasons.length > 0) {
      const reasons = detail.reject_reasons
        .map((reason) => (reason.detail ? `${reason.kind}: ${reason.detail}` : reason.kind))
        .join('; ');
      section.append(el('p', 'reject-reasons', `Reject reasons: ${reasons}`));
    }

    const rawEntries = Object.entries(detail.raw_responses);
    if (rawEntries.length > 0) {
      const raw = el('details', 'raw-responses');
      raw.append(el('summary', undefined, 'Raw backend responses'));
      for (const [backend, text] of rawEntries) {
        const pre = el('pre', undefined, `${backend}: ${text}`);
        raw.append(pre);
      }
      section.append(raw);
    }
    return section;
  }

  private decisionSection(detail: CaseDetail): HTMLElement {
    const section = el('section', 'decision');
    section.append(el('h3', undefined, 'Decision'));

    if (detail.status !== 'pending') {
      const reprocess = el('button', 'reprocess', 'Reprocess (send back to pending)');
      reprocess.type = 'button';
      reprocess.addEventListener('click', () => void this.reprocess(detail.case_id));
      section.append(reprocess);
      return section;
    }

    const validation = el('p', 'validation');
    validation.hidden = true;

    const accept = el('button', 'accept', 'Accept');
    accept.type = 'button';

    const reject = el('button', 'reject', 'Reject');
    reject.type = 'button';

    const reasonSelect = el('select', 'reason-kind');
    const placeholder = el('option', undefined, 'Select a reason…');
    placeholder.value = '';
    reasonSelect.append(placeholder);
    for (const kind of this.reasons) {
      const option = el('option', undefined, kind);
      option.value = kind;
      reasonSelect.append(option);
    }
    const reasonDetail = el('input', 'reason-detail');
    reasonDetail.type = 'text';
    reasonDetail.placeholder = 'reason detail (optional)';

    const fail = (message: string): void => {
      validation.textContent = message;
      validation.hidden = false;
    };

    accept.addEventListener('click', () => {
      validation.hidden = true;
      if (this.reviewer === '') {
        fail('Enter your reviewer name before deciding.');
        return;
      }
      void this.submitDecision(detail.case_id, 'Accepted', undefined, fail);
    });

    reject.addEventListener('click', () => {
      validation.hidden = true;
      if (this.reviewer === '') {
        fail('Enter your reviewer name before deciding.');
        return;
      }
      if (reasonSelect.value === '') {
        fail('A reject reason is required — select one before submitting.');
        return;
      }
      const reason: RejectReasonView = { kind: reasonSelect.value, detail: reasonDetail.value.trim() };
      void this.submitDecision(detail.case_id, 'Rejected', reason, fail);
    });

    const controls = el('div', 'decision-controls');
    controls.append(accept, ' ', reject, ' ', reasonSelect, ' ', reasonDetail);
    section.append(controls, validation);
    return section;
  }

  private async submitDecision(
    caseId: string,
    decision: 'Accepted' | 'Rejected',
    reason: RejectReasonView | undefined,
    fail: (message: string) => void,
  ): Promise<void> {
    try {
      const decided = (await this.client.decide(caseId, decision, this.reviewer, reason)).case;
      this.showNotice(
        decision === 'Accepted'
          ? `Case ${caseId} accepted — code ${decided.assigned_code ?? '(pending)'}.`
          : `Case ${caseId} rejected.`,
      );
      await this.showQueue();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.showNotice(`Case ${caseId} was already resolved by another reviewer.`, 'conflict');
        await this.showQueue();
      } else if (error instanceof ApiError && error.status === 422) {
        fail(error.message);
      } else {
        this.showBanner(describeError(error));
      }
    }
  }

  private async reprocess(caseId: string): Promise<void> {
    try {
      await this.client.reprocess(caseId, this.reviewer);
      this.showNotice(`Case ${caseId} sent back to the pending queue.`);
      await this.showQueue();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.showNotice(`Case ${caseId} is not resolved — nothing to reprocess.`, 'conflict');
        await this.showQueue();
      } else {
        this.showBanner(describeError(error));
      }
    }
  }

  private auditSection(detail: CaseDetail): HTMLElement {
    const section = el('section', 'audit');
    section.append(el('h3', undefined, 'Audit trail'));
    const table = el('table', 'audit-table');
    const head = el('thead');
    const headRow = el('tr');
    for (const title of ['Time', 'Action', 'Reviewer', 'Decision', 'Reason']) {
      headRow.append(el('th', undefined, title));
    }
    head.append(headRow);
    const body = el('tbody');
    for (const event of detail.audit) {
      const row = el('tr');
      row.append(el('td', undefined, event.timestamp));
      row.append(el('td', undefined, event.action));
      row.append(el('td', undefined, event.reviewer || '—'));
      row.append(el('td', undefined, event.decision ?? '—'));
      const reason = event.reason
        ? `${event.reason.kind}${event.reason.detail ? `: ${event.reason.detail}` : ''}`
        : '—';
      row.append(el('td', undefined, reason));
      body.append(row);
    }
    table.append(head, body);
    section.append(table);
    return section;
  }

  // -- metrics view --------------------------------------------------------------

  async showMetrics(): Promise<void> {
    this.lastView = () => this.showMetrics();
    this.clearBanner();
    this.clearNotice();
    try {
      const { rows } = await this.client.metrics();
      const heading = el('h2', undefined, 'Run metrics');
      const table = el('table', 'metrics');
      const head = el('thead');
      const headRow = el('tr');
      for (const title of ['Method', 'Accuracy', 'Precision', 'Recall', 'F1', 'ROC AUC', 'FPR']) {
        headRow.append(el('th', undefined, title));
      }
      head.append(headRow);
      const body = el('tbody');
      for (const row of rows) {
        const tr = el('tr');
        tr.append(el('td', undefined, row.method_name));
        for (const value of [row.accuracy, row.precision, row.recall, row.f1, row.roc_auc, row.fpr]) {
          tr.append(el('td', undefined, value.toFixed(2)));
        }
        if (row.degenerate.length > 0) {
          const last = tr.lastElementChild as HTMLElement;
          last.title = `degenerate: ${row.degenerate.join(', ')}`;
        }
        body.append(tr);
      }
      table.append(head, body);
      this.view.replaceChildren(heading, table);
    } catch (error) {
      if (error instanceof ApiError && error.code === 'no_metrics') {
        this.view.replaceChildren(el('p', 'no-metrics', 'This run has no evaluated metrics.'));
      } else {
        this.showBanner(describeError(error));
      }
    }
  }
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    return error.status === 0
      ? `Review API unreachable — ${error.message}`
      : `Review API error (${error.code}): ${error.message}`;
  }
  return `Unexpected error: ${String(error)}`;
}

export type { CaseDetail, CaseSummary };
