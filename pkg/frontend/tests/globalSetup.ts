/**
 * Boots a real review API for the test run: executes the resolution engine
 * over the bundled fixture dataset into a throwaway run directory, then
 * serves that run over HTTP on a free loopback port. Tests receive the base
 * URL through vitest's provide/inject channel.
 */

import { execFileSync, spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, rmSync } from 'node:fs';
import { createServer } from 'node:net';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { fileURLToPath } from 'node:url';
import type { TestProject } from 'vitest/node';

declare module 'vitest' {
  export interface ProvidedContext {
    apiBase: string;
  }
}

const CONFIG_PATH = fileURLToPath(new URL('../../fixtures/config.yaml', import.meta.url));

let server: ChildProcess | undefined;
let runDir: string | undefined;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once('error', reject);
    probe.listen(0, '127.0.0.1', () => {
      const address = probe.address();
      if (address === null || typeof address === 'string') {
        probe.close();
        reject(new Error('could not determine a free port'));
        return;
      }
      probe.close(() => resolve(address.port));
    });
  });
}

async function waitUntilServing(base: string): Promise<void> {
  const deadline = Date.now() + 30_000;
  let lastError: unknown = undefined;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/cases?status=pending`);
      if (response.ok) {
        return;
      }
      lastError = new Error(`unexpected status ${response.status}`);
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`review API at ${base} never became ready: ${String(lastError)}`);
}

export async function setup(project: TestProject): Promise<void> {
  runDir = mkdtempSync(join(tmpdir(), 'review-console-run-'));
  execFileSync('entitymatch', ['run', '--config', CONFIG_PATH, '--out-dir', runDir], {
    stdio: 'pipe',
  });

  const port = await freePort();
  server = spawn('entitymatch', ['serve', '--run-dir', runDir, '--port', String(port)], {
    stdio: 'ignore',
  });
  const base = `http://127.0.0.1:${port}`;
  await waitUntilServing(base);
  project.provide('apiBase', base);
}

export async function teardown(): Promise<void> {
  if (server !== undefined) {
    server.kill('SIGTERM');
    server = undefined;
  }
  if (runDir !== undefined) {
    rmSync(runDir, { recursive: true, force: true });
    runDir = undefined;
  }
}
