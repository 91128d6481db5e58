/**
 * Browser entry point. Mounts the review console onto the #app element.
 *
 * The only configuration is the review API base URL, resolved in order from:
 *   1. a `window.REVIEW_API_BASE` override (set by an inline script),
 *   2. the `data-api-base` attribute on the #app element,
 *   3. the default local serve address.
 */

import { ReviewApiClient } from './api.js';
import { ReviewConsole } from './console.js';

declare global {
  interface Window {
    REVIEW_API_BASE?: string;
  }
}

const DEFAULT_API_BASE = 'http://127.0.0.1:8720';

export function resolveApiBase(root: HTMLElement): string {
  return window.REVIEW_API_BASE ?? root.dataset['apiBase'] ?? DEFAULT_API_BASE;
}

export function mount(root: HTMLElement): ReviewConsole {
  const console_ = new ReviewConsole(root, new ReviewApiClient(resolveApiBase(root)));
  void console_.start();
  return console_;
}

const appRoot = document.getElementById('app');
if (appRoot !== null) {
  mount(appRoot);
}
