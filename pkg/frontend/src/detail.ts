/**
 * Detail-on-demand panel for a selected heatmap: per-cell element
 * histograms for both dimensions plus the per-cell co-membership heatmap.
 */

import type { DetailResponse } from "./api.js";
import { seqColor } from "./color.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function miniHistogram(doc: Document, counts: number[], labels: string[], peak: number): SVGSVGElement {
  const bar = 7;
  const height = 26;
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(counts.length * bar + 2));
  svg.setAttribute("height", String(height));
  svg.setAttribute("class", "detail-hist");
  counts.forEach((count, i) => {
    const h = peak > 0 ? (count / peak) * (height - 4) : 0;
    const rect = doc.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(1 + i * bar));
    rect.setAttribute("y", String(height - h));
    rect.setAttribute("width", String(bar - 1));
    rect.setAttribute("height", String(h));
    rect.setAttribute("fill", seqColor(0.7));
    rect.setAttribute("data-element", labels[i]);
    rect.setAttribute("data-count", String(count));
    svg.appendChild(rect);
  });
  return svg;
}

function miniHeat(doc: Document, matrix: number[][], peak: number): SVGSVGElement {
  const px = 6;
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(matrix.length * px + 2));
  svg.setAttribute("height", String((matrix[0]?.length ?? 0) * px + 2));
  svg.setAttribute("class", "detail-heat");
  matrix.forEach((column, a) => {
    column.forEach((count, b) => {
      const rect = doc.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(1 + a * px));
      rect.setAttribute("y", String(1 + b * px));
      rect.setAttribute("width", String(px));
      rect.setAttribute("height", String(px));
      rect.setAttribute("fill", peak > 0 ? seqColor(count / peak) : seqColor(0));
      rect.setAttribute("data-count", String(count));
      svg.appendChild(rect);
    });
  });
  return svg;
}

export function renderDetail(container: HTMLElement, detail: DetailResponse): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  container.className = "xtab-detail";

  const heading = doc.createElement("h3");
  heading.textContent = `detail: ${detail.selection.a} vs ${detail.selection.b}`;
  container.appendChild(heading);

  const histPeak = Math.max(
    1,
    ...detail.cells.flatMap((c) => [...c.hist_a, ...c.hist_b]),
  );
  const heatPeak = Math.max(1, ...detail.cells.flatMap((c) => c.heat.flat()));

  const grid = doc.createElement("div");
  grid.className = "detail-grid";
  for (const cell of detail.cells) {
    const block = doc.createElement("div");
    block.className = "detail-cell";
    block.dataset.k = cell.k === null ? "" : String(cell.k);
    block.dataset.l = cell.l === null ? "" : String(cell.l);

    const caption = doc.createElement("div");
    caption.className = "detail-caption";
    caption.textContent = `${cell.row_label} vs ${cell.col_label} (${cell.item_count})`;
    block.appendChild(caption);

    block.appendChild(miniHistogram(doc, cell.hist_a, detail.elements_a, histPeak));
    block.appendChild(miniHistogram(doc, cell.hist_b, detail.elements_b, histPeak));
    block.appendChild(miniHeat(doc, cell.heat, heatPeak));
    grid.appendChild(block);
  }
  container.appendChild(grid);
}
