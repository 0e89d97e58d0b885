import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import type { Snapshot } from '../src/types';

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T = Snapshot>(name: string): T {
  const raw = readFileSync(join(here, 'fixtures', `${name}.json`), 'utf8');
  return JSON.parse(raw) as T;
}

export interface ErrorFixture {
  status: number;
  body: { detail: string };
}

export function errorFixtures(): Record<string, ErrorFixture> {
  return fixture<Record<string, ErrorFixture>>('errors');
}

/** Minimal fetch stand-in that replays a scripted sequence of responses. */
export interface ScriptedResponse {
  status?: number;
  body: unknown;
}

export function scriptedFetch(script: ScriptedResponse[]): {
  fetchImpl: typeof fetch;
  calls: { url: string; method: string; body: unknown }[];
} {
  const calls: { url: string; method: string; body: unknown }[] = [];
  const fetchImpl = (async (url: RequestInfo | URL, init?: RequestInit) => {
    const next = script.shift();
    if (!next) throw new Error(`unexpected request: ${String(url)}`);
    calls.push({
      url: String(url),
      method: init?.method ?? 'GET',
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const status = next.status ?? 200;
    return {
      ok: status < 400,
      status,
      statusText: String(status),
      json: async () => next.body,
    } as Response;
  }) as typeof fetch;
  return { fetchImpl, calls };
}
