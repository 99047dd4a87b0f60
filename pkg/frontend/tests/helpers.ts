// Test plumbing: recorded-fixture loading and a strict scripted fetch.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

export interface Recording {
  request: { method: string; path: string; body?: unknown };
  status: number;
  body: unknown;
}

export function loadRecording(name: string): Recording {
  const raw = readFileSync(join(here, "fixtures", `${name}.json`), "utf-8");
  return JSON.parse(raw) as Recording;
}

/** Serves recorded responses in order, verifying each request matches the
 * recording it answers. Any deviation fails the test: the UI can only ever
 * see what the service actually said. */
export class ScriptedFetch {
  private cursor = 0;

  constructor(private readonly script: Recording[]) {}

  get remaining(): number {
    return this.script.length - this.cursor;
  }

  fetch: FetchLike = async (url, init) => {
    const expected = this.script[this.cursor];
    if (!expected) {
      throw new Error(`unexpected request beyond script: ${init?.method} ${url}`);
    }
    this.cursor += 1;
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const method = init?.method ?? "GET";
    if (method !== expected.request.method || path !== expected.request.path) {
      throw new Error(
        `request ${method} ${path} does not match recording ` +
          `${expected.request.method} ${expected.request.path}`,
      );
    }
    return new Response(JSON.stringify(expected.body), {
      status: expected.status,
      headers: { "Content-Type": "application/json" },
    });
  };
}

export function script(...names: string[]): ScriptedFetch {
  return new ScriptedFetch(names.map(loadRecording));
}

export const instantSleep = () => Promise.resolve();
