/**
 * SVG grid renderer: heatmap grid with marginal histograms, empty-set
 * axes, brushed overlay sub-bins, and clickable labels.
 *
 * Rendering is a pure function of (state, API payloads): no randomness,
 * no timestamps, stable element order, so identical inputs give identical
 * DOM.
 */

import {
  AggregateJson,
  AxisBinJson,
  AxisEntryJson,
  BrushResponse,
  CellJson,
  DeviationJson,
  RankMapJson,
  cellId,
} from "./api.js";
import { EMPTY_CROSS, EMPTY_FILL, divColor, rawPosition, redColor, seqColor } from "./color.js";
import { Orientation } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const GROUP_GAP = 4;
const MARGIN_SIZE = 60;
const LABEL_GUTTER = 72;
const PAD = 10;

export interface GridHandlers {
  onLabelClick?(dim: "a" | "b", element: string): void;
  onHeatmapClick?(a: string, b: string, brush: boolean): void;
  onMarginalClick?(dim: "a" | "b", element: string | null, k: number | null): void;
  onCellEnter?(cell: CellJson, target: SVGElement, event: MouseEvent): void;
  onCellLeave?(): void;
}

export interface GridModel {
  aggregate: AggregateJson;
  rank: RankMapJson | null;
  deviation: DeviationJson | null;
  overlay: BrushResponse | null;
  cellPixel: number;
  orientation: Orientation;
  selection: { a: string; b: string } | null;
}

interface Slot {
  element: string | null;
  bin: AxisBinJson;
  offset: number;
}

function el<K extends keyof SVGElementTagNameMap>(tag: K, attrs: Record<string, string>): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

function fmt(x: number): string {
  return x.toFixed(2);
}

function axisSlots(entries: AxisEntryJson[], cell: number, reverseForRows: boolean): [Slot[], number] {
  let groups = entries.filter((e) => e.shown);
  if (reverseForRows) {
    const empty = groups.filter((g) => g.element === null);
    const rest = groups.filter((g) => g.element !== null).reverse();
    groups = [...empty, ...rest];
  }
  const slots: Slot[] = [];
  let offset = 0;
  groups.forEach((group, index) => {
    if (index > 0) offset += GROUP_GAP;
    const bins = reverseForRows ? [...group.bins].reverse() : group.bins;
    for (const bin of bins) {
      slots.push({ element: group.element, bin, offset });
      offset += cell;
    }
  });
  return [slots, offset];
}

function positionLookup(model: GridModel): (cell: CellJson) => number {
  const transform = model.aggregate.config.transform;
  if (transform === "rank-std" || transform === "rank-dense") {
    const positions = new Map<string, number>();
    for (const entry of model.rank?.ranks ?? []) {
      positions.set(cellId(entry), entry.position);
    }
    return (cell) => positions.get(cellId(cell)) ?? 0;
  }
  if (transform === "deviation") {
    const positions = new Map<string, number>();
    for (const entry of model.deviation?.ratios ?? []) {
      positions.set(cellId(entry), entry.position);
    }
    return (cell) => positions.get(cellId(cell)) ?? 0;
  }
  const preset = model.aggregate.config.color_scale;
  let vmax = 0;
  for (const cell of model.aggregate.cells) {
    vmax = Math.max(vmax, cell.num / cell.den);
  }
  return (cell) => rawPosition(cell.num / cell.den, vmax, preset);
}

export function renderGrid(model: GridModel, handlers: GridHandlers = {}): SVGSVGElement {
  const agg = model.aggregate;
  const cell = model.cellPixel;
  const divergent = agg.config.transform === "deviation";
  const position = positionLookup(model);

  const [cols, gridW] = axisSlots(agg.axes.a, cell, false);
  const [rows, gridH] = axisSlots(agg.axes.b, cell, model.orientation === "bottom-up");

  const cellsById = new Map<string, CellJson>();
  for (const c of agg.cells) cellsById.set(cellId(c), c);
  const brushedById = new Map<string, CellJson>();
  if (model.overlay) {
    for (const c of model.overlay.brushed.cells) brushedById.set(cellId(c), c);
  }

  const left = PAD + LABEL_GUTTER;
  const top = PAD + MARGIN_SIZE;
  const width = left + gridW + MARGIN_SIZE + PAD + 48;
  const height = top + gridH + 30 + PAD;

  const svg = el("svg", {
    xmlns: SVG_NS,
    width: fmt(width),
    height: fmt(height),
    viewBox: `0 0 ${fmt(width)} ${fmt(height)}`,
    class: "xtab-grid",
  });
  svg.appendChild(el("rect", { x: "0", y: "0", width: fmt(width), height: fmt(height), fill: "#ffffff" }));

  const groups = new Map<string, SVGGElement>();
  const groupBounds = new Map<string, { x0: number; y0: number; x1: number; y1: number }>();

  for (const colSlot of cols) {
    for (const rowSlot of rows) {
      const key: CellJson | undefined = cellsById.get(
        cellId({
          col: colSlot.element,
          row: rowSlot.element,
          k: colSlot.element === null ? null : colSlot.bin.k,
          l: rowSlot.element === null ? null : rowSlot.bin.k,
        }),
      );
      if (!key) continue;
      const groupId = `${colSlot.element ?? "∅"}|${rowSlot.element ?? "∅"}`;
      let group = groups.get(groupId);
      if (!group) {
        group = el("g", {
          class: "heatmap",
          "data-a": colSlot.element ?? "",
          "data-b": rowSlot.element ?? "",
        });
        groups.set(groupId, group);
        svg.appendChild(group);
        groupBounds.set(groupId, { x0: Infinity, y0: Infinity, x1: -Infinity, y1: -Infinity });
      }
      const x = left + colSlot.offset;
      const y = top + rowSlot.offset;
      const bounds = groupBounds.get(groupId)!;
      bounds.x0 = Math.min(bounds.x0, x);
      bounds.y0 = Math.min(bounds.y0, y);
      bounds.x1 = Math.max(bounds.x1, x + cell);
      bounds.y1 = Math.max(bounds.y1, y + cell);

      const empty = key.num === 0;
      const pos = empty ? 0 : position(key);
      const fill = empty ? EMPTY_FILL : divergent ? divColor(pos) : seqColor(pos);
      const rect = el("rect", {
        class: empty ? "cell cell-empty" : "cell",
        x: fmt(x),
        y: fmt(y),
        width: fmt(cell),
        height: fmt(cell),
        fill,
        stroke: "#cccccc",
        "stroke-width": "0.5",
        "data-col": key.col ?? "",
        "data-row": key.row ?? "",
        "data-k": key.k === null ? "" : String(key.k),
        "data-l": key.l === null ? "" : String(key.l),
        "data-num": String(key.num),
        "data-den": String(key.den),
        "data-value": key.value,
      });
      rect.addEventListener("mouseenter", (event) =>
        handlers.onCellEnter?.(key, rect, event as MouseEvent),
      );
      rect.addEventListener("mouseleave", () => handlers.onCellLeave?.());
      rect.addEventListener("click", (event) => {
        if (colSlot.element !== null && rowSlot.element !== null) {
          handlers.onHeatmapClick?.(colSlot.element, rowSlot.element, (event as MouseEvent).shiftKey);
        }
      });
      group.appendChild(rect);
      if (empty) {
        group.appendChild(
          el("line", {
            class: "empty-cross",
            x1: fmt(x),
            y1: fmt(y),
            x2: fmt(x + cell),
            y2: fmt(y + cell),
            stroke: EMPTY_CROSS,
            "stroke-width": "1",
          }),
        );
      } else {
        const brushedCell = brushedById.get(cellId(key));
        if (brushedCell && brushedCell.num > 0) {
          const share = brushedCell.num / brushedCell.den / (key.num / key.den);
          const h = cell * Math.min(1, share);
          group.appendChild(
            el("rect", {
              class: "brush-sub",
              x: fmt(x),
              y: fmt(y + cell - h),
              width: fmt(cell),
              height: fmt(h),
              fill: redColor(pos),
              "data-share": share.toFixed(6),
            }),
          );
        }
      }
    }
  }

  if (model.selection) {
    const bounds = groupBounds.get(`${model.selection.a}|${model.selection.b}`);
    if (bounds) {
      svg.appendChild(
        el("rect", {
          class: "selection-outline",
          x: fmt(bounds.x0 - 1.5),
          y: fmt(bounds.y0 - 1.5),
          width: fmt(bounds.x1 - bounds.x0 + 3),
          height: fmt(bounds.y1 - bounds.y0 + 3),
          fill: "none",
          stroke: "#1f4ea1",
          "stroke-width": "1.5",
        }),
      );
    }
  }

  renderMarginals(svg, model, cols, rows, left, top, gridW, handlers);
  renderLabels(svg, model, cols, rows, left, top, gridH, handlers);
  return svg;
}

function renderMarginals(
  svg: SVGSVGElement,
  model: GridModel,
  cols: Slot[],
  rows: Slot[],
  left: number,
  top: number,
  gridW: number,
  handlers: GridHandlers,
): void {
  const agg = model.aggregate;
  const cell = model.cellPixel;
  const barArea = MARGIN_SIZE - 18;
  for (const [dim, slots, marginals] of [
    ["a", cols, agg.marginal_a],
    ["b", rows, agg.marginal_b],
  ] as const) {
    const byKey = new Map<string, (typeof marginals)[number]>();
    for (const m of marginals) byKey.set(`${m.element ?? "∅"}|${m.k ?? "-"}`, m);
    const brushedByKey = new Map<string, (typeof marginals)[number]>();
    if (model.overlay) {
      const source = dim === "a" ? model.overlay.brushed.marginal_a : model.overlay.brushed.marginal_b;
      for (const m of source) brushedByKey.set(`${m.element ?? "∅"}|${m.k ?? "-"}`, m);
    }
    let vmax = 0;
    for (const slot of slots) {
      const m = byKey.get(`${slot.element ?? "∅"}|${slot.element === null ? "-" : slot.bin.k ?? "-"}`);
      if (m) vmax = Math.max(vmax, m.num / m.den);
    }
    for (const slot of slots) {
      const lookup = `${slot.element ?? "∅"}|${slot.element === null ? "-" : slot.bin.k ?? "-"}`;
      const m = byKey.get(lookup);
      if (!m) continue;
      const value = m.num / m.den;
      const size = vmax > 0 ? (barArea * value) / vmax : 0;
      const brushed = brushedByKey.get(lookup);
      const share = brushed && value > 0 ? brushed.num / brushed.den / value : 0;
      const bar =
        dim === "a"
          ? el("rect", {
              class: "marginal-bar",
              x: fmt(left + slot.offset + 1),
              y: fmt(top - 14 - size),
              width: fmt(cell - 2),
              height: fmt(size),
              fill: seqColor(0.75),
              "data-dim": dim,
              "data-element": slot.element ?? "",
              "data-k": slot.element === null ? "" : String(slot.bin.k ?? ""),
              "data-label": m.label,
            })
          : el("rect", {
              class: "marginal-bar",
              x: fmt(left + gridW + 14),
              y: fmt(top + slot.offset + 1),
              width: fmt(size),
              height: fmt(cell - 2),
              fill: seqColor(0.75),
              "data-dim": dim,
              "data-element": slot.element ?? "",
              "data-k": slot.element === null ? "" : String(slot.bin.k ?? ""),
              "data-label": m.label,
            });
      bar.addEventListener("click", () =>
        handlers.onMarginalClick?.(dim, slot.element, slot.element === null ? null : slot.bin.k),
      );
      svg.appendChild(bar);
      if (share > 0) {
        const h = size * Math.min(1, share);
        svg.appendChild(
          dim === "a"
            ? el("rect", {
                class: "brush-sub marginal-brush",
                x: fmt(left + slot.offset + 1),
                y: fmt(top - 14 - h),
                width: fmt(cell - 2),
                height: fmt(h),
                fill: redColor(0.75),
              })
            : el("rect", {
                class: "brush-sub marginal-brush",
                x: fmt(left + gridW + 14),
                y: fmt(top + slot.offset + 1),
                width: fmt(size * Math.min(1, share)),
                height: fmt(cell - 2),
                fill: redColor(0.75),
              }),
        );
      }
      if (cell >= 10) {
        const label =
          dim === "a"
            ? el("text", {
                class: "marginal-label",
                x: fmt(left + slot.offset + cell / 2),
                y: fmt(top - 16 - size),
                "text-anchor": "middle",
                "font-size": "7",
              })
            : el("text", {
                class: "marginal-label",
                x: fmt(left + gridW + 18 + size),
                y: fmt(top + slot.offset + cell / 2 + 3),
                "text-anchor": "start",
                "font-size": "7",
              });
        label.textContent = m.label;
        svg.appendChild(label);
      }
    }
  }
}

function renderLabels(
  svg: SVGSVGElement,
  model: GridModel,
  cols: Slot[],
  rows: Slot[],
  left: number,
  top: number,
  gridH: number,
  handlers: GridHandlers,
): void {
  const cell = model.cellPixel;
  const labelByElement = new Map<string, string>();
  for (const [dim, entries] of [["a", model.aggregate.axes.a], ["b", model.aggregate.axes.b]] as const) {
    for (const entry of entries) {
      labelByElement.set(`${dim}|${entry.element ?? ""}`, entry.label);
    }
  }
  for (const [dim, slots] of [
    ["a", cols],
    ["b", rows],
  ] as const) {
    const groups = new Map<string | null, Slot[]>();
    for (const slot of slots) {
      const list = groups.get(slot.element) ?? [];
      list.push(slot);
      groups.set(slot.element, list);
    }
    for (const [element, groupSlots] of groups) {
      const start = groupSlots[0].offset;
      const end = groupSlots[groupSlots.length - 1].offset + cell;
      const mid = (start + end) / 2;
      const text =
        dim === "a"
          ? el("text", {
              class: element === null ? "axis-label axis-label-empty" : "axis-label",
              x: fmt(left + mid),
              y: fmt(top + gridH + 14),
              "text-anchor": "middle",
              "font-size": "9",
              "data-dim": dim,
              "data-element": element ?? "",
            })
          : el("text", {
              class: element === null ? "axis-label axis-label-empty" : "axis-label",
              x: fmt(left - 6),
              y: fmt(top + mid + 3),
              "text-anchor": "end",
              "font-size": "9",
              "data-dim": dim,
              "data-element": element ?? "",
            });
      text.textContent = labelByElement.get(`${dim}|${element ?? ""}`) ?? "";
      if (element !== null) {
        text.addEventListener("click", () => handlers.onLabelClick?.(dim, element));
      }
      svg.appendChild(text);
      if (groupSlots.length > 1 && cell >= 12) {
        for (const slot of groupSlots) {
          if (!slot.bin.suffix) continue;
          const tick =
            dim === "a"
              ? el("text", {
                  class: "bin-tick",
                  x: fmt(left + slot.offset + cell / 2),
                  y: fmt(top + gridH + 25),
                  "text-anchor": "middle",
                  "font-size": "6",
                })
              : el("text", {
                  class: "bin-tick",
                  x: fmt(left - 6),
                  y: fmt(top + slot.offset + cell / 2 + 2),
                  "text-anchor": "end",
                  "font-size": "6",
                });
          tick.textContent = slot.bin.suffix;
          svg.appendChild(tick);
        }
      }
    }
  }
}
