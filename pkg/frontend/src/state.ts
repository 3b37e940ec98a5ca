/**
 * Client-side interaction state. The server holds none of this: the whole
 * state serializes to a shareable URL blob.
 */

import type { BrushNode, ConfigJson } from "./api.js";

export type Orientation = "bottom-up" | "top-down";

export interface UiState {
  datasetId: string | null;
  config: ConfigJson;
  negateA: string[];
  negateB: string[];
  orderA: string[] | null;
  orderB: string[] | null;
  selection: { a: string; b: string } | null;
  brush: BrushNode | null;
  cellPixel: number;
  orientation: Orientation;
}

export const MIN_CELL_PIXEL = 4;

export function defaultConfig(): ConfigJson {
  return {
    counting: "item",
    cap_a: null,
    cap_b: null,
    collapsed_a: [],
    collapsed_b: [],
    show_empty_a: true,
    show_empty_b: true,
    transform: "raw",
    color_scale: "neutral",
  };
}

export function initialState(): UiState {
  return {
    datasetId: null,
    config: defaultConfig(),
    negateA: [],
    negateB: [],
    orderA: null,
    orderB: null,
    selection: null,
    brush: null,
    cellPixel: 14,
    orientation: "bottom-up",
  };
}

/** JSON stringify with recursively sorted object keys (stable). */
export function stableStringify(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(stableStringify).join(",") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([k, v]) => JSON.stringify(k) + ":" + stableStringify(v));
  return "{" + entries.join(",") + "}";
}

function toBase64(text: string): string {
  const bytes = new TextEncoder().encode(text);
  let binary = "";
  bytes.forEach((b) => (binary += String.fromCharCode(b)));
  return btoa(binary).replace(/\+/g, "-").replace(/\//g, "_").replace(/=+$/, "");
}

function fromBase64(blob: string): string {
  const padded = blob.replace(/-/g, "+").replace(/_/g, "/") + "=".repeat((4 - (blob.length % 4)) % 4);
  const binary = atob(padded);
  const bytes = Uint8Array.from(binary, (c) => c.charCodeAt(0));
  return new TextDecoder().decode(bytes);
}

export function encodeState(state: UiState): string {
  return toBase64(stableStringify(state));
}

export function decodeState(blob: string): UiState {
  const parsed = JSON.parse(fromBase64(blob)) as Partial<UiState>;
  const base = initialState();
  return {
    ...base,
    ...parsed,
    config: { ...base.config, ...(parsed.config ?? {}) },
    cellPixel: Math.max(MIN_CELL_PIXEL, parsed.cellPixel ?? base.cellPixel),
  };
}

export function viewTransforms(state: UiState): {
  negate_a?: string[];
  negate_b?: string[];
  order_a?: string[];
  order_b?: string[];
} {
  const view: ReturnType<typeof viewTransforms> = {};
  if (state.negateA.length) view.negate_a = state.negateA;
  if (state.negateB.length) view.negate_b = state.negateB;
  if (state.orderA) view.order_a = state.orderA;
  if (state.orderB) view.order_b = state.orderB;
  return view;
}

/** Toggle one element in a collapsed/negated name list, returning a copy. */
export function toggleName(names: string[], name: string): string[] {
  return names.includes(name) ? names.filter((n) => n !== name) : [...names, name];
}
