"""Stateless-per-request HTTP JSON API over immutable dataset snapshots.

Brushes and view configs travel in request bodies; the server keeps no
interaction state, so identical requests produce byte-identical responses.
Compute endpoints serialize through the same canonical encoder as the CLI.
"""

from __future__ import annotations

import datetime as _dt
import json
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import __version__
from .binning import aggregate
from .brushing import brushed_aggregate
from .datagen import (
    DriveRuleTable,
    OutputRule,
    SVariantSpec,
    gen_drives,
    gen_s,
)
from .drilldown import detail_views, enumerate_combinations
from .errors import ParseError, SetXTabError
from .io import (
    TableFormatSpec,
    aggregate_to_json,
    brush_from_json,
    canonical_json,
    cell_from_json,
    combinations_to_json,
    config_from_json,
    detail_selection_from_json,
    detail_to_json,
    deviation_to_json,
    overlay_to_json,
    rank_to_json,
    read_table,
    universe_to_json,
    write_aggregate,
    write_table,
)
from .model import DIM_A, DIM_B, SetPairTable, negate_element, reorder_elements
from .transforms import deviation_transform, rank_transform

_BAD_REQUEST_CODES = {"ParseError"}


@dataclass
class DatasetEntry:
    id: str
    name: str
    table: SetPairTable
    created_at: str


class DatasetStore:
    """In-memory map of immutable datasets, optionally directory-backed."""

    def __init__(self, data_dir: str | Path | None = None):
        self._entries: dict[str, DatasetEntry] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self._data_dir = Path(data_dir) if data_dir else None
        if self._data_dir:
            self._data_dir.mkdir(parents=True, exist_ok=True)
            self._load()

    def _load(self):
        for path in sorted(self._data_dir.glob("*.json")):
            obj = json.loads(path.read_text("utf-8"))
            table = read_table(json.dumps(obj["table"]))
            entry = DatasetEntry(obj["id"], obj["name"], table, obj["created_at"])
            self._entries[entry.id] = entry
            number = int(entry.id.split("-")[-1])
            self._counter = max(self._counter, number)

    def register(self, name: str, table: SetPairTable) -> DatasetEntry:
        with self._lock:
            self._counter += 1
            entry = DatasetEntry(
                id=f"ds-{self._counter:04d}",
                name=name,
                table=table,
                created_at=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            )
            # Atomic swap: the dict binding is replaced in one step, so no
            # reader ever observes a partially registered dataset.
            entries = dict(self._entries)
            entries[entry.id] = entry
            self._entries = entries
        if self._data_dir:
            payload = {
                "id": entry.id,
                "name": entry.name,
                "created_at": entry.created_at,
                "table": json.loads(write_table(table, "json").decode("utf-8")),
            }
            (self._data_dir / f"{entry.id}.json").write_text(
                json.dumps(payload), "utf-8"
            )
        return entry

    def get(self, dataset_id: str) -> DatasetEntry | None:
        return self._entries.get(dataset_id)

    def all(self) -> list[DatasetEntry]:
        return [self._entries[k] for k in sorted(self._entries)]


def _handle_json(entry: DatasetEntry) -> dict:
    return {
        "id": entry.id,
        "name": entry.name,
        "n": entry.table.n,
        "created_at": entry.created_at,
        "universes": {
            "a": universe_to_json(entry.table.universe_a),
            "b": universe_to_json(entry.table.universe_b),
        },
    }


ROUTES = [
    {"method": "GET", "path": "/", "summary": "route table"},
    {"method": "GET", "path": "/datasets", "summary": "list datasets"},
    {"method": "POST", "path": "/datasets", "summary": "upload a dataset"},
    {"method": "GET", "path": "/datasets/{id}", "summary": "dataset handle"},
    {"method": "POST", "path": "/generate", "summary": "generate a synthetic dataset"},
    {"method": "POST", "path": "/datasets/{id}/aggregate", "summary": "cross-tabulate"},
    {"method": "POST", "path": "/datasets/{id}/detail", "summary": "detail views"},
    {"method": "POST", "path": "/datasets/{id}/combinations", "summary": "cell combinations"},
    {"method": "POST", "path": "/datasets/{id}/brush", "summary": "brushed overlay"},
]


def create_app(
    data_dir: str | Path | None = None, ui_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="setxtab", version=__version__)
    store = DatasetStore(data_dir)
    app.state.store = store
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    def error_response(code: str, message: str, status: int) -> JSONResponse:
        return JSONResponse({"code": code, "message": message}, status_code=status)

    @app.exception_handler(SetXTabError)
    async def _domain_error(_req, exc: SetXTabError):
        status = 400 if exc.code in _BAD_REQUEST_CODES else 422
        return error_response(exc.code, str(exc), status)

    async def read_body(request: Request) -> dict:
        try:
            body = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as exc:
            raise ParseError(f"request body is not valid JSON: {exc}") from exc
        if not isinstance(body, dict):
            raise ParseError("request body must be a JSON object")
        return body

    def dataset_or_404(dataset_id: str) -> DatasetEntry | JSONResponse:
        entry = store.get(dataset_id)
        if entry is None:
            return error_response("UnknownDataset", f"no dataset {dataset_id!r}", 404)
        return entry

    def canonical(obj: dict) -> Response:
        return Response(content=canonical_json(obj), media_type="application/json")

    def view_table(entry: DatasetEntry, body: dict) -> SetPairTable:
        """Apply request-level view transforms: element negation and display
        order.  Keeps the API stateless; each request works on its own
        transformed copy of the registered (immutable) dataset."""
        table = entry.table
        for dim, key in ((DIM_A, "negate_a"), (DIM_B, "negate_b")):
            for name in body.get(key) or []:
                table = negate_element(table, dim, table.universe(dim).index(name))
        for dim, key in ((DIM_A, "order_a"), (DIM_B, "order_b")):
            names = body.get(key)
            if names:
                universe = table.universe(dim)
                order = [universe.index(n) for n in names]
                reordered = reorder_elements(universe, order)
                table = table.replace(
                    **{f"universe_{dim}": reordered}
                )
        return table

    @app.get("/")
    async def catalog():
        from .transforms import PRESETS

        return {
            "service": "setxtab",
            "version": __version__,
            "routes": ROUTES,
            "color_scales": [
                {"id": p.id, "gamma": p.gamma, "divergent": p.divergent}
                for p in PRESETS.values()
            ],
        }

    @app.get("/datasets")
    async def list_datasets():
        return {"datasets": [_handle_json(e) for e in store.all()]}

    @app.get("/datasets/{dataset_id}")
    async def get_dataset(dataset_id: str):
        entry = dataset_or_404(dataset_id)
        if isinstance(entry, JSONResponse):
            return entry
        return _handle_json(entry)

    @app.post("/datasets", status_code=201)
    async def upload(request: Request):
        body = await read_body(request)
        if "content" not in body:
            raise ParseError("upload body needs a 'content' field")
        fmt = body.get("format") or {}
        spec = TableFormatSpec(
            column_a=fmt.get("column_a"),
            column_b=fmt.get("column_b"),
            set_delimiter=fmt.get("set_delimiter", ";"),
            cell_delimiter=fmt.get("cell_delimiter", ","),
            empty_token=fmt.get("empty_token", ""),
            extra_columns=tuple(fmt["extra_columns"]) if fmt.get("extra_columns") else None,
            universe_a=tuple(fmt["universe_a"]) if fmt.get("universe_a") else None,
            universe_b=tuple(fmt["universe_b"]) if fmt.get("universe_b") else None,
        )
        table = read_table(body["content"], spec)
        entry = store.register(body.get("name", "upload"), table)
        return JSONResponse(_handle_json(entry), status_code=201)

    @app.post("/generate", status_code=201)
    async def generate(request: Request):
        body = await read_body(request)
        variant = body.get("variant")
        if variant is None:
            raise ParseError("generate body needs a 'variant' field")
        if "seed" not in body or "n" not in body:
            raise ParseError("generate body needs 'n' and 'seed'")
        n = int(body["n"])
        seed = int(body["seed"])
        if variant == "drives":
            rules = _rules_from_json(body.get("rules")) if body.get("rules") else None
            table = gen_drives(n, seed, rules)
            name = f"drives-n{n}-s{seed}"
        else:
            table = gen_s(SVariantSpec(variant, n, seed))
            name = f"{variant}-n{n}-s{seed}"
        entry = store.register(body.get("name", name), table)
        return JSONResponse(_handle_json(entry), status_code=201)

    @app.post("/datasets/{dataset_id}/aggregate")
    async def aggregate_endpoint(dataset_id: str, request: Request):
        entry = dataset_or_404(dataset_id)
        if isinstance(entry, JSONResponse):
            return entry
        body = await read_body(request)
        table = view_table(entry, body)
        config = config_from_json(body.get("config", {}), table.universe_a, table.universe_b)
        result = aggregate(table, config)
        accept = request.headers.get("accept", "")
        if "text/csv" in accept:
            return Response(content=write_aggregate(result, "csv"), media_type="text/csv")
        payload = {"aggregate": aggregate_to_json(result), "rank": None, "deviation": None}
        if config.transform == "rank-std":
            payload["rank"] = rank_to_json(result, rank_transform(result, "standard"))
        elif config.transform == "rank-dense":
            payload["rank"] = rank_to_json(result, rank_transform(result, "dense"))
        elif config.transform == "deviation":
            payload["deviation"] = deviation_to_json(result, deviation_transform(result))
        return canonical(payload)

    @app.post("/datasets/{dataset_id}/detail")
    async def detail_endpoint(dataset_id: str, request: Request):
        entry = dataset_or_404(dataset_id)
        if isinstance(entry, JSONResponse):
            return entry
        body = await read_body(request)
        if "selection" not in body:
            raise ParseError("detail body needs a 'selection' field")
        table = view_table(entry, body)
        selection = detail_selection_from_json(body["selection"], table)
        result = detail_views(table, selection)
        return canonical(detail_to_json(result, table))

    @app.post("/datasets/{dataset_id}/combinations")
    async def combinations_endpoint(dataset_id: str, request: Request):
        entry = dataset_or_404(dataset_id)
        if isinstance(entry, JSONResponse):
            return entry
        body = await read_body(request)
        if "cell" not in body:
            raise ParseError("combinations body needs a 'cell' field")
        table = view_table(entry, body)
        config = config_from_json(body.get("config", {}), table.universe_a, table.universe_b)
        cell = cell_from_json(body["cell"], table.universe_a, table.universe_b)
        combos = enumerate_combinations(table, config, cell)
        return canonical(combinations_to_json(combos, table))

    @app.post("/datasets/{dataset_id}/brush")
    async def brush_endpoint(dataset_id: str, request: Request):
        entry = dataset_or_404(dataset_id)
        if isinstance(entry, JSONResponse):
            return entry
        body = await read_body(request)
        if "brush" not in body:
            raise ParseError("brush body needs a 'brush' field")
        table = view_table(entry, body)
        config = config_from_json(body.get("config", {}), table.universe_a, table.universe_b)
        brush = brush_from_json(body["brush"], table)
        overlay = brushed_aggregate(table, config, brush)
        return canonical(overlay_to_json(overlay))

    return app


def _rules_from_json(obj: dict) -> DriveRuleTable:
    try:
        rules = tuple(
            OutputRule(
                float(r["base"]),
                tuple(float(w) for w in r["weights"]),
                float(r.get("card_weight", 0.0)),
            )
            for r in obj["rules"]
        )
        return DriveRuleTable(
            tuple(obj["input_elements"]),
            tuple(obj["output_elements"]),
            tuple(float(p) for p in obj["input_p"]),
            rules,
        )
    except KeyError as exc:
        raise ParseError(f"rule table missing field {exc}") from exc


def run(
    host: str = "127.0.0.1",
    port: int = 8000,
    data_dir: str | None = None,
    ui_dir: str | None = None,
):  # pragma: no cover
    import uvicorn

    uvicorn.run(create_app(data_dir, ui_dir), host=host, port=port)
