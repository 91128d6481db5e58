/** Shared helpers for the live-API test suites. */

import { ReviewApiClient } from '../src/api.js';

/** The three declared names the fixture run leaves pending for review. */
export const EXPECTED_PENDING = [
  'GRANITOS DO MINHO LDA',
  'FARMACIA MODERNA DO PORTO SA',
  'SIMBOLO II - ATIVIDADES IMOBILIARIAS, LDA',
];

/** Poll until `probe` returns a truthy value; fail loudly on timeout. */
export async function until<T>(
  probe: () => T | null | undefined | false,
  what: string,
  timeoutMs = 10_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = probe();
    if (value) {
      return value;
    }
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
}

/**
 * Send every resolved fixture case back to pending so each test starts from
 * the same three-case queue regardless of what the previous test decided.
 */
export async function restoreAllPending(client: ReviewApiClient): Promise<void> {
  const page = await client.listCases('all', 0, 500);
  for (const summary of page.cases) {
    if (summary.status === 'resolved') {
      await client.reprocess(summary.case_id, 'suite-restore');
    }
  }
}

/** Find the case id for a declared name via the API. */
export async function caseIdFor(client: ReviewApiClient, declaredName: string): Promise<string> {
  const page = await client.listCases('all', 0, 500);
  const match = page.cases.find((summary) => summary.declared_name === declaredName);
  if (match === undefined) {
    throw new Error(`no fixture case with declared name ${declaredName}`);
  }
  return match.case_id;
}
