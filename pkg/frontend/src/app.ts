/**
 * Application wiring: interaction state drives API requests, responses
 * drive rendering. Concurrent in-flight requests resolve last-write-wins
 * per panel via monotonically increasing sequence numbers; stale responses
 * are discarded. All displayed numbers come from the API.
 */

import {
  AggregateResponse,
  ApiClient,
  BrushNode,
  BrushResponse,
  CellJson,
  DatasetHandle,
  cellId,
} from "./api.js";
import { renderControls } from "./controls.js";
import { renderDetail } from "./detail.js";
import {
  MIN_CELL_PIXEL,
  UiState,
  decodeState,
  encodeState,
  initialState,
  toggleName,
  viewTransforms,
} from "./state.js";
import { Tooltip } from "./tooltip.js";
import { renderGrid } from "./view.js";

const DEMO_N = 2000;
const DEMO_SEED = 7;

export class App {
  state: UiState;
  readonly gridHost: HTMLElement;
  readonly controlsHost: HTMLElement;
  readonly detailHost: HTMLElement;
  readonly statusHost: HTMLElement;
  readonly tooltip: Tooltip;

  private aggregateSeq = 0;
  private detailSeq = 0;
  private tooltipSeq = 0;
  private lastAggregate: AggregateResponse | null = null;
  private lastOverlay: BrushResponse | null = null;
  private datasets: DatasetHandle[] = [];

  constructor(
    readonly root: HTMLElement,
    readonly api: ApiClient,
    state?: UiState,
  ) {
    this.state = state ?? initialState();
    const doc = root.ownerDocument;
    root.classList.add("xtab-app");
    this.controlsHost = doc.createElement("div");
    this.gridHost = doc.createElement("div");
    this.gridHost.className = "xtab-grid-host";
    this.detailHost = doc.createElement("div");
    this.statusHost = doc.createElement("div");
    this.statusHost.className = "xtab-status";
    root.append(this.controlsHost, this.statusHost, this.gridHost, this.detailHost);
    this.tooltip = new Tooltip(root);
  }

  /** Restore state from a shareable blob (URL hash payload). */
  static fromBlob(root: HTMLElement, api: ApiClient, blob: string | null): App {
    let state: UiState | undefined;
    if (blob) {
      try {
        state = decodeState(blob);
      } catch {
        state = undefined; // unreadable blobs fall back to a fresh state
      }
    }
    return new App(root, api, state);
  }

  stateBlob(): string {
    return encodeState(this.state);
  }

  private syncUrl(): void {
    const win = this.root.ownerDocument.defaultView;
    if (win && win.location) {
      win.location.hash = this.stateBlob();
    }
  }

  private notice(message: string): void {
    this.statusHost.textContent = message;
  }

  async refreshDatasets(): Promise<void> {
    this.datasets = (await this.api.datasets()).datasets;
  }

  async loadDemo(variant = "S1"): Promise<void> {
    const handle = await this.api.generate({ variant, n: DEMO_N, seed: DEMO_SEED });
    await this.refreshDatasets().catch(() => undefined);
    await this.setDataset(handle.id);
  }

  async setDataset(id: string): Promise<void> {
    this.state = {
      ...initialState(),
      datasetId: id,
      cellPixel: this.state.cellPixel,
      orientation: this.state.orientation,
    };
    await this.refresh();
  }

  /** Re-request the aggregate (and overlay when a brush is active). */
  async refresh(): Promise<void> {
    const id = this.state.datasetId;
    if (!id) return;
    const seq = ++this.aggregateSeq;
    const view = viewTransforms(this.state);
    try {
      const aggregatePromise = this.api.aggregate(id, this.state.config, view);
      const overlayPromise = this.state.brush
        ? this.api.brush(id, this.state.brush, this.state.config, view)
        : Promise.resolve(null);
      const [aggregate, overlay] = await Promise.all([aggregatePromise, overlayPromise]);
      if (seq !== this.aggregateSeq) return; // stale
      this.lastAggregate = aggregate;
      this.lastOverlay = overlay;
      this.render();
      this.syncUrl();
    } catch (error) {
      if (seq !== this.aggregateSeq) return;
      this.notice(`request failed: ${(error as Error).message}`);
    }
  }

  private render(): void {
    if (!this.lastAggregate) return;
    const svg = renderGrid(
      {
        aggregate: this.lastAggregate.aggregate,
        rank: this.lastAggregate.rank,
        deviation: this.lastAggregate.deviation,
        overlay: this.lastOverlay,
        cellPixel: Math.max(MIN_CELL_PIXEL, this.state.cellPixel),
        orientation: this.state.orientation,
        selection: this.state.selection,
      },
      {
        onLabelClick: (dim, element) => void this.toggleCollapse(dim, element),
        onHeatmapClick: (a, b, brush) =>
          void (brush ? this.brushHeatmap(a, b) : this.selectHeatmap(a, b)),
        onMarginalClick: (dim, element, k) => void this.brushMarginal(dim, element, k),
        onCellEnter: (cell, _target, event) => void this.hoverCell(cell, event),
        onCellLeave: () => this.leaveCell(),
      },
    );
    this.gridHost.textContent = "";
    this.gridHost.appendChild(svg);
    this.notice("");
    renderControls(this.controlsHost, this.state, this.lastAggregate.aggregate, this.datasets, {
      loadDemo: (variant) => void this.loadDemo(variant),
      setDataset: (id) => void this.setDataset(id),
      patchConfig: (patch) => void this.patchConfig(patch),
      setCap: (dim, cap) =>
        void this.patchConfig(dim === "a" ? { cap_a: cap } : { cap_b: cap }),
      toggleNegate: (dim, name) => void this.toggleNegate(dim, name),
      moveElement: (dim, name, delta) => void this.moveElement(dim, name, delta),
      setCellPixel: (px) => {
        this.state = { ...this.state, cellPixel: Math.max(MIN_CELL_PIXEL, px) };
        this.render();
        this.syncUrl();
      },
      toggleOrientation: () => {
        this.state = {
          ...this.state,
          orientation: this.state.orientation === "bottom-up" ? "top-down" : "bottom-up",
        };
        this.render();
        this.syncUrl();
      },
      clearBrush: () => void this.clearBrush(),
    });
  }

  async patchConfig(patch: Partial<UiState["config"]>): Promise<void> {
    this.state = { ...this.state, config: { ...this.state.config, ...patch } };
    await this.refresh();
  }

  async toggleCollapse(dim: "a" | "b", element: string): Promise<void> {
    const key = dim === "a" ? "collapsed_a" : "collapsed_b";
    await this.patchConfig({ [key]: toggleName(this.state.config[key], element) });
  }

  async toggleNegate(dim: "a" | "b", name: string): Promise<void> {
    this.state =
      dim === "a"
        ? { ...this.state, negateA: toggleName(this.state.negateA, name) }
        : { ...this.state, negateB: toggleName(this.state.negateB, name) };
    await this.refresh();
  }

  async moveElement(dim: "a" | "b", name: string, delta: number): Promise<void> {
    const universe = this.lastAggregate?.aggregate.universes[dim];
    if (!universe) return;
    const order = universe.display_order.map((i) => universe.elements[i]);
    const from = order.indexOf(name);
    const to = from + delta;
    if (from < 0 || to < 0 || to >= order.length) return;
    [order[from], order[to]] = [order[to], order[from]];
    this.state = dim === "a" ? { ...this.state, orderA: order } : { ...this.state, orderB: order };
    await this.refresh();
  }

  async selectHeatmap(a: string, b: string): Promise<void> {
    this.state = { ...this.state, selection: { a, b } };
    const id = this.state.datasetId;
    if (!id) return;
    const seq = ++this.detailSeq;
    try {
      const detail = await this.api.detail(
        id,
        { a, b, config: this.state.config },
        viewTransforms(this.state),
      );
      if (seq !== this.detailSeq) return;
      renderDetail(this.detailHost, detail);
      this.render(); // selection outline
      this.syncUrl();
    } catch (error) {
      if (seq === this.detailSeq) this.notice(`detail failed: ${(error as Error).message}`);
    }
  }

  async brushHeatmap(a: string, b: string): Promise<void> {
    await this.setBrush({ type: "heatmap", a, b });
  }

  async brushMarginal(dim: "a" | "b", element: string | null, k: number | null): Promise<void> {
    await this.setBrush({ type: "marginal", dim, element, k, config: this.state.config });
  }

  async setBrush(brush: BrushNode): Promise<void> {
    this.state = { ...this.state, brush };
    await this.refresh();
  }

  async clearBrush(): Promise<void> {
    this.state = { ...this.state, brush: null };
    this.lastOverlay = null;
    await this.refresh();
  }

  async hoverCell(cell: CellJson, event: MouseEvent): Promise<void> {
    const id = this.state.datasetId;
    if (!id) return;
    const seq = ++this.tooltipSeq;
    try {
      const combos = await this.api.combinations(
        id,
        { col: cell.col, row: cell.row, k: cell.k, l: cell.l },
        this.state.config,
        viewTransforms(this.state),
      );
      if (seq !== this.tooltipSeq) return;
      this.tooltip.show(combos, event.clientX ?? 0, event.clientY ?? 0);
    } catch {
      if (seq === this.tooltipSeq) this.tooltip.hide();
    }
  }

  leaveCell(): void {
    this.tooltipSeq += 1; // late tooltip responses are dropped
    this.tooltip.hide();
  }

  /** Cell lookup helper for tests and external callers. */
  cellValue(cell: { col: string | null; row: string | null; k: number | null; l: number | null }): CellJson | undefined {
    return this.lastAggregate?.aggregate.cells.find((c) => cellId(c) === cellId(cell));
  }
}
