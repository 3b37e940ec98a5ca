"""Dataset and result (de)serialization: delimited text, JSON, CSV export.

All writers are deterministic byte-for-byte; rationals travel as integer
num/den pairs (plus a convenience decimal string) so conservation checks
stay exact across the wire.  ``canonical_json`` is the single serializer
shared by the CLI and the HTTP service.
"""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from . import brushing
from .binning import (
    AggregateResult,
    AxisBin,
    CellKey,
    MarginalBin,
    ViewConfig,
    bin_label,
    element_bins,
)
from .drilldown import (
    CombinationList,
    DetailResult,
    DetailSelection,
)
from .errors import InvalidConfigError, InvalidKeyError, ParseError, SetXTabError
from .model import DIM_A, DIM_B, ElementUniverse, SetPairTable, SetValue, parse_set_value


# ---------------------------------------------------------------------------
# primitives

def canonical_json(obj: Any) -> bytes:
    """The one JSON encoding used on every output path."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def fraction_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator, "value": decimal_str(q)}


def fraction_from_json(obj: Mapping) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def decimal_str(q: Fraction) -> str:
    return format(float(q), ".6g")


def marginal_label(mb: MarginalBin) -> str:
    """Fraction "items/cardinality" when exact, decimal when bins merged."""
    if mb.display_as_fraction and mb.denominator:
        return f"{mb.item_count}/{mb.denominator}"
    return decimal_str(mb.value)


def universe_to_json(u: ElementUniverse) -> dict:
    return {
        "name": u.name,
        "elements": list(u.elements),
        "display_order": list(u.display_order),
        "negated": list(u.negated),
    }


def universe_from_json(obj: Mapping) -> ElementUniverse:
    return ElementUniverse(
        obj["name"],
        tuple(obj["elements"]),
        tuple(obj.get("display_order") or range(len(obj["elements"]))),
        tuple(obj.get("negated") or [False] * len(obj["elements"])),
    )


# ---------------------------------------------------------------------------
# view config and cell keys

def config_to_json(config: ViewConfig, ua: ElementUniverse, ub: ElementUniverse) -> dict:
    return {
        "counting": config.counting,
        "cap_a": config.cap_a,
        "cap_b": config.cap_b,
        "collapsed_a": [ua.elements[i] for i in sorted(config.collapsed_a)],
        "collapsed_b": [ub.elements[i] for i in sorted(config.collapsed_b)],
        "show_empty_a": config.show_empty_a,
        "show_empty_b": config.show_empty_b,
        "transform": config.transform,
        "color_scale": config.color_scale,
    }


def config_from_json(obj: Mapping, ua: ElementUniverse, ub: ElementUniverse) -> ViewConfig:
    if not isinstance(obj, Mapping):
        raise InvalidConfigError("config must be an object")
    known = {
        "counting", "cap_a", "cap_b", "collapsed_a", "collapsed_b",
        "show_empty_a", "show_empty_b", "transform", "color_scale",
    }
    unknown = set(obj) - known
    if unknown:
        raise InvalidConfigError(f"unknown config fields: {sorted(unknown)}")
    return ViewConfig(
        counting=obj.get("counting", "item"),
        cap_a=obj.get("cap_a"),
        cap_b=obj.get("cap_b"),
        collapsed_a=frozenset(ua.index(name) for name in obj.get("collapsed_a", [])),
        collapsed_b=frozenset(ub.index(name) for name in obj.get("collapsed_b", [])),
        show_empty_a=bool(obj.get("show_empty_a", True)),
        show_empty_b=bool(obj.get("show_empty_b", True)),
        transform=obj.get("transform", "raw"),
        color_scale=obj.get("color_scale", "neutral"),
    )


def cell_to_json(key: CellKey, ua: ElementUniverse, ub: ElementUniverse) -> dict:
    return {
        "col": None if key.col is None else ua.elements[key.col],
        "row": None if key.row is None else ub.elements[key.row],
        "k": key.k,
        "l": key.l,
    }


def cell_from_json(obj: Mapping, ua: ElementUniverse, ub: ElementUniverse) -> CellKey:
    try:
        col = None if obj.get("col") is None else ua.index(obj["col"])
        row = None if obj.get("row") is None else ub.index(obj["row"])
    except Exception as exc:
        raise InvalidKeyError(str(exc)) from exc
    k = obj.get("k")
    l = obj.get("l")
    return CellKey(col, row, None if k is None else int(k), None if l is None else int(l))


# ---------------------------------------------------------------------------
# dataset tables

@dataclass(frozen=True)
class TableFormatSpec:
    """How a delimited dataset maps onto the two set-valued columns."""

    column_a: str | None = None
    column_b: str | None = None
    set_delimiter: str = ";"
    cell_delimiter: str = ","
    empty_token: str = ""
    extra_columns: tuple[str, ...] | None = None
    universe_a: tuple[str, ...] | None = None
    universe_b: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.set_delimiter == self.cell_delimiter:
            raise InvalidConfigError("set delimiter must differ from the cell delimiter")


def _parse_cell(
    text: str, spec: TableFormatSpec, universe: ElementUniverse, policy: str, line: int, column: str
) -> tuple[SetValue, ElementUniverse]:
    if text == spec.empty_token:
        text = ""
    try:
        return parse_set_value(text, spec.set_delimiter, universe, policy)
    except SetXTabError:
        raise
    except Exception as exc:
        raise ParseError(str(exc), line=line, column=column) from exc


def read_table(data: bytes | str, spec: TableFormatSpec | None = None) -> SetPairTable:
    """Read a dataset from delimited text or JSON.

    Universes come from the spec when supplied (unknown names then reject);
    otherwise they are inferred in first-appearance order.  An empty cell
    is the empty set.
    """
    spec = spec or TableFormatSpec()
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _table_from_fidelity_json(json.loads(text))
    if stripped.startswith("["):
        return _table_from_records(json.loads(text), spec)
    return _table_from_csv(text, spec)


def _fresh_universes(
    spec: TableFormatSpec, name_a: str, name_b: str
) -> tuple[ElementUniverse, ElementUniverse, str, str]:
    """Universes plus per-dimension parse policy: supplied means strict."""
    ua = ElementUniverse(name_a, tuple(spec.universe_a or ()))
    ub = ElementUniverse(name_b, tuple(spec.universe_b or ()))
    policy_a = "strict" if spec.universe_a is not None else "register"
    policy_b = "strict" if spec.universe_b is not None else "register"
    return ua, ub, policy_a, policy_b


def _table_from_csv(text: str, spec: TableFormatSpec) -> SetPairTable:
    reader = csv.reader(_io.StringIO(text), delimiter=spec.cell_delimiter)
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise ParseError(f"bad delimited input: {exc}") from exc
    rows = [r for r in rows if r]
    if not rows:
        raise ParseError("input has no header row")
    header = [h.strip() for h in rows[0]]
    col_a = spec.column_a if spec.column_a is not None else (header[0] if header else None)
    col_b = spec.column_b if spec.column_b is not None else (header[1] if len(header) > 1 else None)
    if col_a not in header:
        raise ParseError(f"missing set column {col_a!r}", line=1)
    if col_b not in header:
        raise ParseError(f"missing set column {col_b!r}", line=1)
    idx_a = header.index(col_a)
    idx_b = header.index(col_b)
    extra_names = (
        list(spec.extra_columns)
        if spec.extra_columns is not None
        else [h for i, h in enumerate(header) if i not in (idx_a, idx_b)]
    )
    for name in extra_names:
        if name not in header:
            raise ParseError(f"missing extra column {name!r}", line=1)
    extra_idx = {name: header.index(name) for name in extra_names}

    ua, ub, policy_a, policy_b = _fresh_universes(spec, col_a, col_b)
    bits_a: list[int] = []
    bits_b: list[int] = []
    extras: dict[str, list[str]] = {name: [] for name in extra_names}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(row)}", line=lineno
            )
        value_a, ua = _parse_cell(row[idx_a].strip(), spec, ua, policy_a, lineno, col_a)
        value_b, ub = _parse_cell(row[idx_b].strip(), spec, ub, policy_b, lineno, col_b)
        bits_a.append(value_a.bits)
        bits_b.append(value_b.bits)
        for name in extra_names:
            extras[name].append(row[extra_idx[name]])
    return SetPairTable(ua, ub, bits_a, bits_b, extras)


def _table_from_records(records: Sequence, spec: TableFormatSpec) -> SetPairTable:
    col_a = spec.column_a or "A"
    col_b = spec.column_b or "B"
    ua, ub, policy_a, policy_b = _fresh_universes(spec, col_a, col_b)
    bits_a: list[int] = []
    bits_b: list[int] = []
    extras: dict[str, list[str]] = {}
    for i, record in enumerate(records):
        if not isinstance(record, Mapping):
            raise ParseError("records must be objects", line=i + 1)
        for col, store, universe_attr, policy in (
            (col_a, bits_a, "a", policy_a),
            (col_b, bits_b, "b", policy_b),
        ):
            raw = record.get(col, "")
            if isinstance(raw, list):
                raw = spec.set_delimiter.join(raw)
            universe = ua if universe_attr == "a" else ub
            value, universe = _parse_cell(str(raw), spec, universe, policy, i + 1, col)
            if universe_attr == "a":
                ua = universe
            else:
                ub = universe
            store.append(value.bits)
        for key, value in record.items():
            if key in (col_a, col_b):
                continue
            extras.setdefault(key, [""] * i).append(str(value))
        for key in extras:
            if len(extras[key]) < len(bits_a):
                extras[key].append("")
    return SetPairTable(ua, ub, bits_a, bits_b, extras)


def _table_from_fidelity_json(obj: Mapping) -> SetPairTable:
    try:
        ua = universe_from_json(obj["universe_a"])
        ub = universe_from_json(obj["universe_b"])
        items = obj["items"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from exc
    bits_a = []
    bits_b = []
    for item in items:
        bits_a.append(SetValue.from_names(item.get("a", []), ua).bits)
        bits_b.append(SetValue.from_names(item.get("b", []), ub).bits)
    extras = {k: [str(x) for x in v] for k, v in obj.get("extras", {}).items()}
    return SetPairTable(ua, ub, bits_a, bits_b, extras)


def write_table(table: SetPairTable, fmt: str = "csv", spec: TableFormatSpec | None = None) -> bytes:
    """Serialize a dataset; CSV for interchange, JSON for full fidelity."""
    if fmt == "json":
        obj = {
            "universe_a": universe_to_json(table.universe_a),
            "universe_b": universe_to_json(table.universe_b),
            "items": [
                {
                    "a": table.value_a(i).names(table.universe_a),
                    "b": table.value_b(i).names(table.universe_b),
                }
                for i in range(table.n)
            ],
        }
        if table.extras:
            obj["extras"] = {k: list(v) for k, v in sorted(table.extras.items())}
        return canonical_json(obj)
    if fmt != "csv":
        raise InvalidConfigError(f"unknown table format {fmt!r}")
    spec = spec or TableFormatSpec()
    out = _io.StringIO()
    writer = csv.writer(out, delimiter=spec.cell_delimiter, lineterminator="\n")
    col_a = spec.column_a or table.universe_a.name
    col_b = spec.column_b or table.universe_b.name
    extra_names = sorted(table.extras)
    writer.writerow([col_a, col_b, *extra_names])
    for i in range(table.n):
        writer.writerow(
            [
                spec.set_delimiter.join(table.value_a(i).names(table.universe_a)),
                spec.set_delimiter.join(table.value_b(i).names(table.universe_b)),
                *[table.extras[name][i] for name in extra_names],
            ]
        )
    return out.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# aggregate results

def _axis_json(result: AggregateResult, dim: str) -> list[dict]:
    u = result.universe(dim)
    shown_empty = result.config.show_empty(dim)
    out = []
    for element, bins in result.layout(dim):
        entry = {
            "element": None if element is None else u.elements[element],
            "label": "∅" if element is None else u.label(element),
            "shown": shown_empty if element is None else True,
            "bins": [
                {
                    "k": b.index,
                    "cards": list(b.cards),
                    "merged": b.merged,
                    "label": bin_label(u, element, b) if element is not None else "∅",
                    "suffix": b.suffix,
                }
                for b in bins
            ],
        }
        out.append(entry)
    return out


def _marginal_json(
    result: AggregateResult, dim: str
) -> list[dict]:
    u = result.universe(dim)
    marginal = result.marginal_a if dim == DIM_A else result.marginal_b
    out = []
    for element, bins in result.layout(dim):
        for b in bins:
            key = (element, b.index if element is not None else None)
            mb = marginal[key]
            label = marginal_label(mb)
            out.append(
                {
                    "element": None if element is None else u.elements[element],
                    "k": key[1],
                    "num": mb.value.numerator,
                    "den": mb.value.denominator,
                    "value": decimal_str(mb.value),
                    "item_count": mb.item_count,
                    "fraction": mb.display_as_fraction,
                    "label": label,
                }
            )
    return out


def aggregate_to_json(result: AggregateResult) -> dict:
    ua, ub = result.universe_a, result.universe_b
    cells = []
    for key in result.grid_keys():
        value = result.cells[key]
        entry = cell_to_json(key, ua, ub)
        entry.update(
            {"num": value.numerator, "den": value.denominator, "value": decimal_str(value)}
        )
        cells.append(entry)
    return {
        "n": result.n,
        "total": fraction_json(result.total),
        "config": config_to_json(result.config, ua, ub),
        "universes": {"a": universe_to_json(ua), "b": universe_to_json(ub)},
        "axes": {"a": _axis_json(result, DIM_A), "b": _axis_json(result, DIM_B)},
        "cells": cells,
        "marginal_a": _marginal_json(result, DIM_A),
        "marginal_b": _marginal_json(result, DIM_B),
    }


def aggregate_from_json(obj: Mapping) -> AggregateResult:
    ua = universe_from_json(obj["universes"]["a"])
    ub = universe_from_json(obj["universes"]["b"])
    config = config_from_json(obj["config"], ua, ub)
    cells: dict[CellKey, Fraction] = {}
    for entry in obj["cells"]:
        key = cell_from_json(entry, ua, ub)
        cells[key] = Fraction(int(entry["num"]), int(entry["den"]))

    def marginal(dim: str, entries) -> dict:
        u = ua if dim == DIM_A else ub
        cap = config.cap(dim)
        collapsed = config.collapsed(dim)
        out = {}
        for entry in entries:
            element = None if entry["element"] is None else u.index(entry["element"])
            idx = entry["k"]
            denominator = None
            if element is not None:
                for b in element_bins(len(u), cap, element in collapsed):
                    if b.index == idx and not b.merged:
                        denominator = b.cards[0]
            out[(element, idx)] = MarginalBin(
                Fraction(int(entry["num"]), int(entry["den"])),
                int(entry["item_count"]),
                bool(entry["fraction"]),
                denominator,
            )
        return out

    return AggregateResult(
        universe_a=ua,
        universe_b=ub,
        config=config,
        n=int(obj["n"]),
        cells=cells,
        marginal_a=marginal(DIM_A, obj["marginal_a"]),
        marginal_b=marginal(DIM_B, obj["marginal_b"]),
        total=fraction_from_json(obj["total"]),
        empty_flags=frozenset(k for k, v in cells.items() if v == 0),
    )


def write_aggregate(result: AggregateResult, fmt: str = "json") -> bytes:
    """Serialize an aggregate; JSON is lossless, CSV lists non-zero cells."""
    if fmt == "json":
        return canonical_json(aggregate_to_json(result))
    if fmt != "csv":
        raise InvalidConfigError(f"unknown aggregate format {fmt!r}")
    ua, ub = result.universe_a, result.universe_b
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["col", "row", "k", "l", "num", "den", "value"])
    for key in result.grid_keys():
        value = result.cells[key]
        if value == 0:
            continue
        writer.writerow(
            [
                "" if key.col is None else ua.elements[key.col],
                "" if key.row is None else ub.elements[key.row],
                "" if key.k is None else key.k,
                "" if key.l is None else key.l,
                value.numerator,
                value.denominator,
                decimal_str(value),
            ]
        )
    return out.getvalue().encode("utf-8")


def read_aggregate(data: bytes | str) -> AggregateResult:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    return aggregate_from_json(json.loads(text))


# ---------------------------------------------------------------------------
# transform maps

def rank_to_json(result: AggregateResult, rank_map) -> dict:
    ua, ub = result.universe_a, result.universe_b
    entries = []
    for key in result.grid_keys():
        if key not in rank_map.ranks:
            continue
        entry = cell_to_json(key, ua, ub)
        entry["rank"] = rank_map.ranks[key]
        entry["position"] = round(rank_map.position(key), 12)
        entries.append(entry)
    return {"mode": rank_map.mode, "max_rank": rank_map.max_rank, "ranks": entries}


def deviation_to_json(result: AggregateResult, dev_map) -> dict:
    ua, ub = result.universe_a, result.universe_b
    entries = []
    for key in result.grid_keys():
        entry = cell_to_json(key, ua, ub)
        entry["ratio"] = round(dev_map.ratios[key], 12)
        entry["zero"] = key in dev_map.flagged_zero
        entry["position"] = round(dev_map.position(key), 12)
        entries.append(entry)
    return {"log_span": round(dev_map.log_span, 12), "ratios": entries}


# ---------------------------------------------------------------------------
# drill-down

def detail_to_json(detail: DetailResult, table: SetPairTable) -> dict:
    ua, ub = table.universe_a, table.universe_b
    sel = detail.selection
    bins_a = element_bins(len(ua), sel.config.cap_a, sel.e_a in sel.config.collapsed_a)
    bins_b = element_bins(len(ub), sel.config.cap_b, sel.e_b in sel.config.collapsed_b)
    cells = []
    for ba in bins_a:
        for bb in bins_b:
            cell = detail.per_cell[(ba.index, bb.index)]
            cells.append(
                {
                    "k": ba.index,
                    "l": bb.index,
                    "col_label": bin_label(ua, sel.e_a, ba),
                    "row_label": bin_label(ub, sel.e_b, bb),
                    "item_count": cell.item_count,
                    "hist_a": list(cell.hist_a),
                    "hist_b": list(cell.hist_b),
                    "heat": [list(row) for row in cell.heat],
                }
            )
    return {
        "selection": {
            "a": ua.elements[sel.e_a],
            "b": ub.elements[sel.e_b],
            "config": config_to_json(sel.config, ua, ub),
        },
        "elements_a": [ua.label(i) for i in range(len(ua))],
        "elements_b": [ub.label(i) for i in range(len(ub))],
        "cells": cells,
    }


def detail_selection_from_json(obj: Mapping, table: SetPairTable) -> DetailSelection:
    config = config_from_json(obj.get("config", {}), table.universe_a, table.universe_b)
    return DetailSelection(
        e_a=table.universe_a.index(obj["a"]),
        e_b=table.universe_b.index(obj["b"]),
        config=config,
    )


def combinations_to_json(combos: CombinationList, table: SetPairTable) -> dict:
    ua, ub = table.universe_a, table.universe_b
    return {
        "cell": cell_to_json(combos.cell, ua, ub),
        "rule": combos.rule_label,
        "total": fraction_json(combos.total_value),
        "entries": [
            {
                "a": entry.set_a.names(ua),
                "b": entry.set_b.names(ub),
                "items": entry.item_count,
                "weight": fraction_json(entry.weight),
            }
            for entry in combos.entries
        ],
    }


# ---------------------------------------------------------------------------
# brushes

_BRUSH_TAGS = {
    "element": brushing.ElementPresent,
    "card-is": brushing.CardinalityIs,
    "card-at-least": brushing.CardinalityAtLeast,
    "heatmap": brushing.HeatmapMember,
    "cell": brushing.CellMember,
    "marginal": brushing.MarginalBinMember,
    "items": brushing.ItemIdIn,
    "and": brushing.And,
    "or": brushing.Or,
    "not": brushing.Not,
}


def brush_to_json(brush: brushing.Brush, table: SetPairTable) -> dict:
    ua, ub = table.universe_a, table.universe_b
    if isinstance(brush, brushing.ElementPresent):
        u = ua if brush.dim == DIM_A else ub
        return {"type": "element", "dim": brush.dim, "element": u.elements[brush.element]}
    if isinstance(brush, brushing.CardinalityIs):
        return {"type": "card-is", "dim": brush.dim, "card": brush.card}
    if isinstance(brush, brushing.CardinalityAtLeast):
        return {"type": "card-at-least", "dim": brush.dim, "card": brush.card}
    if isinstance(brush, brushing.HeatmapMember):
        return {"type": "heatmap", "a": ua.elements[brush.e_a], "b": ub.elements[brush.e_b]}
    if isinstance(brush, brushing.CellMember):
        return {
            "type": "cell",
            "cell": cell_to_json(brush.cell, ua, ub),
            "config": config_to_json(brush.config, ua, ub),
        }
    if isinstance(brush, brushing.MarginalBinMember):
        u = ua if brush.dim == DIM_A else ub
        return {
            "type": "marginal",
            "dim": brush.dim,
            "element": None if brush.element is None else u.elements[brush.element],
            "k": brush.card_idx,
            "config": config_to_json(brush.config, ua, ub),
        }
    if isinstance(brush, brushing.ItemIdIn):
        return {"type": "items", "ids": sorted(brush.ids)}
    if isinstance(brush, brushing.And):
        return {"type": "and", "children": [brush_to_json(c, table) for c in brush.children]}
    if isinstance(brush, brushing.Or):
        return {"type": "or", "children": [brush_to_json(c, table) for c in brush.children]}
    if isinstance(brush, brushing.Not):
        return {"type": "not", "child": brush_to_json(brush.child, table)}
    raise InvalidConfigError(f"unknown brush node {type(brush).__name__}")


def brush_from_json(obj: Mapping, table: SetPairTable) -> brushing.Brush:
    if not isinstance(obj, Mapping) or "type" not in obj:
        raise ParseError("brush nodes need a 'type' field")
    tag = obj["type"]
    if tag not in _BRUSH_TAGS:
        raise ParseError(f"unknown brush type {tag!r}")
    ua, ub = table.universe_a, table.universe_b
    if tag == "element":
        dim = obj["dim"]
        u = ua if dim == DIM_A else ub
        return brushing.ElementPresent(dim, u.index(obj["element"]))
    if tag == "card-is":
        return brushing.CardinalityIs(obj["dim"], int(obj["card"]))
    if tag == "card-at-least":
        return brushing.CardinalityAtLeast(obj["dim"], int(obj["card"]))
    if tag == "heatmap":
        return brushing.HeatmapMember(ua.index(obj["a"]), ub.index(obj["b"]))
    if tag == "cell":
        config = config_from_json(obj.get("config", {}), ua, ub)
        return brushing.CellMember(cell_from_json(obj["cell"], ua, ub), config)
    if tag == "marginal":
        dim = obj["dim"]
        u = ua if dim == DIM_A else ub
        config = config_from_json(obj.get("config", {}), ua, ub)
        element = None if obj.get("element") is None else u.index(obj["element"])
        return brushing.MarginalBinMember(dim, element, obj.get("k"), config)
    if tag == "items":
        return brushing.ItemIdIn(frozenset(int(i) for i in obj["ids"]))
    if tag == "not":
        return brushing.Not(brush_from_json(obj["child"], table))
    children = tuple(brush_from_json(c, table) for c in obj.get("children", []))
    return brushing.And(children) if tag == "and" else brushing.Or(children)


def overlay_to_json(overlay: brushing.BrushOverlay) -> dict:
    return {
        "base": aggregate_to_json(overlay.base),
        "brushed": aggregate_to_json(overlay.brushed),
        "item_ids": overlay.item_ids,
    }
