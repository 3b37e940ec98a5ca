/**
 * Control pane: dataset pick/generate, counting mode, transform, color
 * preset, caps, empty-set visibility, negation, reordering, zoom,
 * orientation, brush clearing.
 */

import type { AggregateJson, DatasetHandle } from "./api.js";
import { MIN_CELL_PIXEL, UiState } from "./state.js";

export interface ControlActions {
  loadDemo(variant: string): void;
  setDataset(id: string): void;
  patchConfig(patch: Partial<UiState["config"]>): void;
  setCap(dim: "a" | "b", cap: number | null): void;
  toggleNegate(dim: "a" | "b", name: string): void;
  moveElement(dim: "a" | "b", name: string, delta: number): void;
  setCellPixel(px: number): void;
  toggleOrientation(): void;
  clearBrush(): void;
}

const VARIANTS = ["S1", "S2", "S3", "S4", "S5", "S6", "drives"];

function field(doc: Document, labelText: string, input: HTMLElement): HTMLLabelElement {
  const label = doc.createElement("label");
  label.className = "control-field";
  const span = doc.createElement("span");
  span.textContent = labelText;
  label.append(span, input);
  return label;
}

export function renderControls(
  host: HTMLElement,
  state: UiState,
  aggregate: AggregateJson | null,
  datasets: DatasetHandle[],
  actions: ControlActions,
): void {
  const doc = host.ownerDocument;
  host.textContent = "";
  host.className = "xtab-controls";

  const demoRow = doc.createElement("div");
  demoRow.className = "control-demos";
  for (const variant of VARIANTS) {
    const button = doc.createElement("button");
    button.className = "demo-button";
    button.dataset.variant = variant;
    button.textContent = variant;
    button.addEventListener("click", () => actions.loadDemo(variant));
    demoRow.appendChild(button);
  }
  host.appendChild(field(doc, "demo", demoRow));

  if (datasets.length) {
    const select = doc.createElement("select");
    select.className = "dataset-select";
    for (const handle of datasets) {
      const option = doc.createElement("option");
      option.value = handle.id;
      option.textContent = `${handle.id} ${handle.name} (${handle.n})`;
      option.selected = handle.id === state.datasetId;
      select.appendChild(option);
    }
    select.addEventListener("change", () => actions.setDataset(select.value));
    host.appendChild(field(doc, "dataset", select));
  }

  const counting = doc.createElement("select");
  counting.className = "counting-select";
  for (const mode of ["item", "element"] as const) {
    const option = doc.createElement("option");
    option.value = mode;
    option.textContent = mode === "item" ? "count items" : "count elements";
    option.selected = state.config.counting === mode;
    counting.appendChild(option);
  }
  counting.addEventListener("change", () =>
    actions.patchConfig({ counting: counting.value as "item" | "element" }),
  );
  host.appendChild(field(doc, "counting", counting));

  const transform = doc.createElement("select");
  transform.className = "transform-select";
  for (const mode of ["raw", "rank-std", "rank-dense", "deviation"] as const) {
    const option = doc.createElement("option");
    option.value = mode;
    option.textContent = mode;
    option.selected = state.config.transform === mode;
    transform.appendChild(option);
  }
  transform.addEventListener("change", () =>
    actions.patchConfig({ transform: transform.value as UiState["config"]["transform"] }),
  );
  host.appendChild(field(doc, "transform", transform));

  const preset = doc.createElement("select");
  preset.className = "preset-select";
  for (const id of ["emphasize-low", "neutral", "emphasize-high", "divergent"]) {
    const option = doc.createElement("option");
    option.value = id;
    option.textContent = id;
    option.selected = state.config.color_scale === id;
    preset.appendChild(option);
  }
  preset.addEventListener("change", () => actions.patchConfig({ color_scale: preset.value }));
  host.appendChild(field(doc, "colors", preset));

  for (const dim of ["a", "b"] as const) {
    const cap = doc.createElement("input");
    cap.type = "number";
    cap.min = "1";
    cap.className = `cap-input cap-${dim}`;
    const current = dim === "a" ? state.config.cap_a : state.config.cap_b;
    cap.value = current === null ? "" : String(current);
    cap.addEventListener("change", () =>
      actions.setCap(dim, cap.value === "" ? null : Math.max(1, Number(cap.value))),
    );
    host.appendChild(field(doc, `cap ${dim.toUpperCase()} (blank = full)`, cap));

    const show = doc.createElement("input");
    show.type = "checkbox";
    show.className = `show-empty-${dim}`;
    show.checked = dim === "a" ? state.config.show_empty_a : state.config.show_empty_b;
    show.addEventListener("change", () =>
      actions.patchConfig(dim === "a" ? { show_empty_a: show.checked } : { show_empty_b: show.checked }),
    );
    host.appendChild(field(doc, `show ∅ ${dim.toUpperCase()}`, show));
  }

  if (aggregate) {
    for (const dim of ["a", "b"] as const) {
      const universe = aggregate.universes[dim];
      const block = doc.createElement("div");
      block.className = `element-controls element-controls-${dim}`;
      universe.display_order.forEach((index, pos) => {
        const name = universe.elements[index];
        const row = doc.createElement("div");
        row.className = "element-row";
        row.dataset.element = name;

        const label = doc.createElement("span");
        label.textContent = universe.negated[index] ? `¬${name}` : name;
        row.appendChild(label);

        const negate = doc.createElement("button");
        negate.className = "negate-button";
        negate.dataset.dim = dim;
        negate.dataset.element = name;
        negate.textContent = "¬";
        negate.addEventListener("click", () => actions.toggleNegate(dim, name));
        row.appendChild(negate);

        if (pos > 0) {
          const up = doc.createElement("button");
          up.className = "move-button";
          up.textContent = "↑";
          up.addEventListener("click", () => actions.moveElement(dim, name, -1));
          row.appendChild(up);
        }
        block.appendChild(row);
      });
      host.appendChild(field(doc, `${universe.name} elements`, block));
    }
  }

  const zoom = doc.createElement("input");
  zoom.type = "range";
  zoom.min = String(MIN_CELL_PIXEL);
  zoom.max = "40";
  zoom.value = String(state.cellPixel);
  zoom.className = "zoom-range";
  zoom.addEventListener("change", () => actions.setCellPixel(Number(zoom.value)));
  host.appendChild(field(doc, `cell px (min ${MIN_CELL_PIXEL})`, zoom));

  const orientation = doc.createElement("button");
  orientation.className = "orientation-toggle";
  orientation.textContent =
    state.orientation === "bottom-up" ? "rows grow upward" : "rows grow downward";
  orientation.addEventListener("click", () => actions.toggleOrientation());
  host.appendChild(field(doc, "orientation", orientation));

  if (state.brush) {
    const clear = doc.createElement("button");
    clear.className = "clear-brush";
    clear.textContent = "clear brush";
    clear.addEventListener("click", () => actions.clearBrush());
    host.appendChild(field(doc, "brush", clear));
  }
}
