/**
 * Color ramps. Positions for rank and deviation modes arrive precomputed
 * in the API payloads; only the raw-value ramp position (a pure display
 * mapping) is computed here.
 */

export type Rgb = [number, number, number];

const SEQ_LOW: Rgb = [247, 251, 255];
const SEQ_HIGH: Rgb = [8, 48, 107];
const RED_LOW: Rgb = [255, 245, 240];
const RED_HIGH: Rgb = [103, 0, 13];
const DIV_LOW: Rgb = [178, 24, 43]; // under-represented
const DIV_HIGH: Rgb = [33, 102, 172]; // over-represented: blue end
const WHITE: Rgb = [255, 255, 255];

export const EMPTY_FILL = "#fff9c4";
export const EMPTY_CROSS = "#c9b458";

const GAMMA: Record<string, number> = {
  "emphasize-low": 0.5,
  neutral: 1.0,
  "emphasize-high": 2.0,
  divergent: 1.0,
};

function clamp01(t: number): number {
  return Math.min(1, Math.max(0, t));
}

function lerp(c0: Rgb, c1: Rgb, t: number): string {
  const u = clamp01(t);
  const mix = c0.map((a, i) => Math.round(a + (c1[i] - a) * u));
  return "#" + mix.map((v) => v.toString(16).padStart(2, "0")).join("");
}

export function seqColor(position: number): string {
  return lerp(SEQ_LOW, SEQ_HIGH, position);
}

export function redColor(position: number): string {
  return lerp(RED_LOW, RED_HIGH, position);
}

export function divColor(position: number): string {
  const t = clamp01(position);
  return t < 0.5 ? lerp(DIV_LOW, WHITE, t * 2) : lerp(WHITE, DIV_HIGH, (t - 0.5) * 2);
}

/** Raw-value ramp position under a preset's gamma. */
export function rawPosition(value: number, vmax: number, preset: string): number {
  if (vmax <= 0) return 0;
  return clamp01(value / vmax) ** (GAMMA[preset] ?? 1.0);
}
