/**
 * Hover tooltip: the aggregation rule of the hovered cell, its exact total,
 * and the full contributing combination list ranked by item count.
 */

import type { CombinationsResponse } from "./api.js";

export class Tooltip {
  readonly root: HTMLDivElement;

  constructor(parent: HTMLElement) {
    this.root = parent.ownerDocument.createElement("div");
    this.root.className = "xtab-tooltip";
    this.root.style.position = "absolute";
    this.root.style.display = "none";
    this.root.style.pointerEvents = "none";
    parent.appendChild(this.root);
  }

  show(combos: CombinationsResponse, x: number, y: number): void {
    const doc = this.root.ownerDocument;
    this.root.textContent = "";

    const rule = doc.createElement("div");
    rule.className = "tooltip-rule";
    rule.textContent = combos.rule;
    this.root.appendChild(rule);

    const total = doc.createElement("div");
    total.className = "tooltip-total";
    total.dataset.num = String(combos.total.num);
    total.dataset.den = String(combos.total.den);
    total.textContent =
      combos.total.den === 1
        ? `total ${combos.total.num}`
        : `total ${combos.total.num}/${combos.total.den} = ${combos.total.value}`;
    this.root.appendChild(total);

    const list = doc.createElement("table");
    list.className = "tooltip-combos";
    for (const entry of combos.entries) {
      const row = doc.createElement("tr");
      const count = doc.createElement("td");
      count.className = "combo-count";
      count.textContent = String(entry.items);
      const sets = doc.createElement("td");
      sets.className = "combo-sets";
      sets.textContent = `${entry.b.join("+") || "∅"} vs ${entry.a.join("+") || "∅"}`;
      row.append(count, sets);
      list.appendChild(row);
    }
    this.root.appendChild(list);

    this.root.style.left = `${x + 12}px`;
    this.root.style.top = `${y + 12}px`;
    this.root.style.display = "block";
  }

  hide(): void {
    this.root.style.display = "none";
  }
}
