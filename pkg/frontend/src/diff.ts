/**
 * Character-level diff between two names, used to highlight the segments a
 * reviewer should look at (dropped abbreviation expansions, punctuation,
 * extra words). Alignment is a standard longest-common-subsequence walk;
 * characters outside the LCS are marked changed on their own side.
 */

export interface DiffSpan {
  text: string;
  changed: boolean;
}

export interface NameDiff {
  left: DiffSpan[];
  right: DiffSpan[];
}

function append(spans: DiffSpan[], text: string, changed: boolean): void {
  const last = spans[spans.length - 1];
  if (last !== undefined && last.changed === changed) {
    last.text += text;
  } else {
    spans.push({ text, changed });
  }
}

/**
 * Diff two strings character by character.
 *
 * The spans on each side concatenate back to exactly that side's input, in
 * order; spans alternate between changed and unchanged runs. Two equal
 * strings yield a single unchanged span each (or none, for empty strings).
 */
export function charDiff(a: string, b: string): NameDiff {
  const left: DiffSpan[] = [];
  const right: DiffSpan[] = [];
  const charsA = Array.from(a);
  const charsB = Array.from(b);
  const n = charsA.length;
  const m = charsB.length;

  // lcs[i][j] = LCS length of charsA[i:] vs charsB[j:]
  const lcs: Int32Array[] = [];
  for (let i = 0; i <= n; i++) {
    lcs.push(new Int32Array(m + 1));
  }
  for (let i = n - 1; i >= 0; i--) {
    const row = lcs[i]!;
    const below = lcs[i + 1]!;
    for (let j = m - 1; j >= 0; j--) {
      row[j] = charsA[i] === charsB[j]
        ? below[j + 1]! + 1
        : Math.max(below[j]!, row[j + 1]!);
    }
  }

  let i = 0;
  let j = 0;
  while (i < n && j < m) {
    const ca = charsA[i]!;
    const cb = charsB[j]!;
    if (ca === cb) {
      append(left, ca, false);
      append(right, cb, false);
      i += 1;
      j += 1;
    } else if (lcs[i + 1]![j]! >= lcs[i]![j + 1]!) {
      append(left, ca, true);
      i += 1;
    } else {
      append(right, cb, true);
      j += 1;
    }
  }
  while (i < n) {
    append(left, charsA[i]!, true);
    i += 1;
  }
  while (j < m) {
    append(right, charsB[j]!, true);
    j += 1;
  }
  return { left, right };
}
