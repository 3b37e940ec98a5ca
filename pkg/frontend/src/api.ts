/**
 * Typed client for the cross-tabulation JSON API.
 *
 * The UI never computes aggregate values itself: every displayed number
 * comes from these response payloads (rationals as exact num/den pairs).
 */

export interface FractionJson {
  num: number;
  den: number;
  value: string;
}

export interface UniverseJson {
  name: string;
  elements: string[];
  display_order: number[];
  negated: boolean[];
}

export interface ConfigJson {
  counting: "item" | "element";
  cap_a: number | null;
  cap_b: number | null;
  collapsed_a: string[];
  collapsed_b: string[];
  show_empty_a: boolean;
  show_empty_b: boolean;
  transform: "raw" | "rank-std" | "rank-dense" | "deviation";
  color_scale: string;
}

export interface CellJson {
  col: string | null;
  row: string | null;
  k: number | null;
  l: number | null;
  num: number;
  den: number;
  value: string;
}

export interface AxisBinJson {
  k: number | null;
  cards: number[];
  merged: boolean;
  label: string;
  suffix: string;
}

export interface AxisEntryJson {
  element: string | null;
  label: string;
  shown: boolean;
  bins: AxisBinJson[];
}

export interface MarginalJson {
  element: string | null;
  k: number | null;
  num: number;
  den: number;
  value: string;
  item_count: number;
  fraction: boolean;
  label: string;
}

export interface AggregateJson {
  n: number;
  total: FractionJson;
  config: ConfigJson;
  universes: { a: UniverseJson; b: UniverseJson };
  axes: { a: AxisEntryJson[]; b: AxisEntryJson[] };
  cells: CellJson[];
  marginal_a: MarginalJson[];
  marginal_b: MarginalJson[];
}

export interface RankEntryJson {
  col: string | null;
  row: string | null;
  k: number | null;
  l: number | null;
  rank: number;
  position: number;
}

export interface RankMapJson {
  mode: string;
  max_rank: number;
  ranks: RankEntryJson[];
}

export interface DeviationEntryJson {
  col: string | null;
  row: string | null;
  k: number | null;
  l: number | null;
  ratio: number;
  zero: boolean;
  position: number;
}

export interface DeviationJson {
  log_span: number;
  ratios: DeviationEntryJson[];
}

export interface AggregateResponse {
  aggregate: AggregateJson;
  rank: RankMapJson | null;
  deviation: DeviationJson | null;
}

export interface DetailCellJson {
  k: number | null;
  l: number | null;
  col_label: string;
  row_label: string;
  item_count: number;
  hist_a: number[];
  hist_b: number[];
  heat: number[][];
}

export interface DetailResponse {
  selection: { a: string; b: string; config: ConfigJson };
  elements_a: string[];
  elements_b: string[];
  cells: DetailCellJson[];
}

export interface CombinationEntryJson {
  a: string[];
  b: string[];
  items: number;
  weight: FractionJson;
}

export interface CombinationsResponse {
  cell: { col: string | null; row: string | null; k: number | null; l: number | null };
  rule: string;
  total: FractionJson;
  entries: CombinationEntryJson[];
}

export interface BrushResponse {
  base: AggregateJson;
  brushed: AggregateJson;
  item_ids: number[];
}

export interface DatasetHandle {
  id: string;
  name: string;
  n: number;
  created_at: string;
  universes: { a: UniverseJson; b: UniverseJson };
}

export type BrushNode =
  | { type: "element"; dim: "a" | "b"; element: string }
  | { type: "card-is"; dim: "a" | "b"; card: number }
  | { type: "card-at-least"; dim: "a" | "b"; card: number }
  | { type: "heatmap"; a: string; b: string }
  | { type: "cell"; cell: CellKeyJson; config: ConfigJson }
  | { type: "marginal"; dim: "a" | "b"; element: string | null; k: number | null; config: ConfigJson }
  | { type: "items"; ids: number[] }
  | { type: "and"; children: BrushNode[] }
  | { type: "or"; children: BrushNode[] }
  | { type: "not"; child: BrushNode };

export interface CellKeyJson {
  col: string | null;
  row: string | null;
  k: number | null;
  l: number | null;
}

/** Extra view parameters sent alongside the config on compute requests. */
export interface ViewTransforms {
  negate_a?: string[];
  negate_b?: string[];
  order_a?: string[];
  order_b?: string[];
}

export interface Transport {
  request(method: string, path: string, body?: unknown): Promise<unknown>;
}

export class HttpTransport implements Transport {
  constructor(private readonly baseUrl: string = "") {}

  async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      const code = (payload as { code?: string }).code ?? `http-${response.status}`;
      const message = (payload as { message?: string }).message ?? response.statusText;
      throw new ApiError(code, message, response.status);
    }
    return payload;
  }
}

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private readonly transport: Transport) {}

  catalog(): Promise<{ routes: unknown[]; color_scales: { id: string; gamma: number; divergent: boolean }[] }> {
    return this.transport.request("GET", "/") as never;
  }

  datasets(): Promise<{ datasets: DatasetHandle[] }> {
    return this.transport.request("GET", "/datasets") as never;
  }

  generate(body: { variant: string; n: number; seed: number }): Promise<DatasetHandle> {
    return this.transport.request("POST", "/generate", body) as never;
  }

  upload(body: { name: string; content: string; format?: unknown }): Promise<DatasetHandle> {
    return this.transport.request("POST", "/datasets", body) as never;
  }

  aggregate(id: string, config: ConfigJson, view: ViewTransforms = {}): Promise<AggregateResponse> {
    return this.transport.request("POST", `/datasets/${id}/aggregate`, { config, ...view }) as never;
  }

  detail(
    id: string,
    selection: { a: string; b: string; config: ConfigJson },
    view: ViewTransforms = {},
  ): Promise<DetailResponse> {
    return this.transport.request("POST", `/datasets/${id}/detail`, { selection, ...view }) as never;
  }

  combinations(
    id: string,
    cell: CellKeyJson,
    config: ConfigJson,
    view: ViewTransforms = {},
  ): Promise<CombinationsResponse> {
    return this.transport.request("POST", `/datasets/${id}/combinations`, { cell, config, ...view }) as never;
  }

  brush(id: string, brush: BrushNode, config: ConfigJson, view: ViewTransforms = {}): Promise<BrushResponse> {
    return this.transport.request("POST", `/datasets/${id}/brush`, { brush, config, ...view }) as never;
  }
}

/** Key of one grid cell as a stable string (map lookups). */
export function cellId(cell: { col: string | null; row: string | null; k: number | null; l: number | null }): string {
  return [cell.col ?? "∅", cell.row ?? "∅", cell.k ?? "-", cell.l ?? "-"].join("|");
}
