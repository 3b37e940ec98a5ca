import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import type { Transport } from "../src/api.js";
import { stableStringify } from "../src/state.js";

const here = dirname(fileURLToPath(import.meta.url));

export interface FixtureFile {
  dataset: string;
  fixtures: Record<string, unknown>;
}

export function loadFixtures(name = "s1.json"): FixtureFile {
  return JSON.parse(readFileSync(join(here, "..", "fixtures", name), "utf-8"));
}

/** Transport that replays canned responses captured from the real service. */
export class FixtureTransport implements Transport {
  readonly requests: string[] = [];

  constructor(private readonly fixtures: Record<string, unknown>) {}

  request(method: string, path: string, body?: unknown): Promise<unknown> {
    const key = `${method} ${path} ${stableStringify(body ?? null)}`;
    this.requests.push(key);
    const payload = this.fixtures[key];
    if (payload === undefined) {
      return Promise.reject(new Error(`no fixture for: ${key}`));
    }
    return Promise.resolve(JSON.parse(JSON.stringify(payload)));
  }
}

/** Let fire-and-forget handlers and chained promises settle. */
export async function settle(turns = 4): Promise<void> {
  for (let i = 0; i < turns; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function gcd(a: number, b: number): number {
  return b === 0 ? Math.abs(a) : gcd(b, a % b);
}

export interface Frac {
  num: number;
  den: number;
}

export function addFrac(x: Frac, y: Frac): Frac {
  const num = x.num * y.den + y.num * x.den;
  const den = x.den * y.den;
  const g = gcd(num, den) || 1;
  return { num: num / g, den: den / g };
}

export function equalFrac(x: Frac, y: Frac): boolean {
  return x.num * y.den === y.num * x.den;
}
