"""Command-line front end: generate, aggregate, detail, combinations, render, serve.

Exit codes: 0 success, 1 data/domain errors (the error code goes to
stderr), 2 usage errors.  Outputs share the canonical serialization with
the HTTP service, byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .binning import ViewConfig, aggregate
from .brushing import brushed_aggregate
from .datagen import SVariantSpec, gen_drives, gen_s
from .drilldown import detail_views, enumerate_combinations
from .errors import InvalidConfigError, SetXTabError
from .io import (
    TableFormatSpec,
    aggregate_to_json,
    brush_from_json,
    canonical_json,
    cell_from_json,
    combinations_to_json,
    config_from_json,
    decimal_str,
    detail_selection_from_json,
    detail_to_json,
    deviation_to_json,
    rank_to_json,
    read_table,
    write_aggregate,
    write_table,
)
from .model import DIM_A, DIM_B, SetPairTable, negate_element, reorder_elements
from .service import _rules_from_json
from .svg import SvgRenderSpec, render_svg
from .transforms import deviation_transform, rank_transform


def _parse_dim(token: str) -> str:
    low = token.strip().lower()
    if low in ("a", DIM_A):
        return DIM_A
    if low in ("b", DIM_B):
        return DIM_B
    raise InvalidConfigError(f"unknown dimension {token!r} (use A or B)")


def _split_dim_arg(value: str) -> list[tuple[str, str]]:
    """Parse "A:Music,B:Loud" into [(dim, token), ...]."""
    out = []
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise InvalidConfigError(f"expected DIM:VALUE, got {part!r}")
        dim, token = part.split(":", 1)
        out.append((_parse_dim(dim), token.strip()))
    return out


def _load_table(args) -> SetPairTable:
    data = Path(args.input).read_bytes()
    spec = TableFormatSpec(
        column_a=getattr(args, "column_a", None),
        column_b=getattr(args, "column_b", None),
        set_delimiter=getattr(args, "set_delimiter", ";"),
    )
    table = read_table(data, spec)
    for dim, name in _split_dim_arg(getattr(args, "negate", "") or ""):
        table = negate_element(table, dim, table.universe(dim).index(name))
    reorder = getattr(args, "reorder", None)
    if reorder:
        for dim, names in _group_reorder(reorder).items():
            universe = table.universe(dim)
            perm = [universe.index(n) for n in names]
            new_universe = reorder_elements(universe, perm)
            if dim == DIM_A:
                table = table.replace(universe_a=new_universe)
            else:
                table = table.replace(universe_b=new_universe)
    return table


def _group_reorder(value: str) -> dict[str, list[str]]:
    """Parse "A:Music;Family;Traffic" (',' separates dims, ';' names)."""
    out: dict[str, list[str]] = {}
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        dim, names = part.split(":", 1)
        out[_parse_dim(dim)] = [n.strip() for n in names.split(";") if n.strip()]
    return out


def _build_config(args, table: SetPairTable) -> ViewConfig:
    base = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text("utf-8"))
    config = config_from_json(base, table.universe_a, table.universe_b)

    collapsed_a = set(config.collapsed_a)
    collapsed_b = set(config.collapsed_b)
    if getattr(args, "collapse_all", False):
        collapsed_a = set(range(len(table.universe_a)))
        collapsed_b = set(range(len(table.universe_b)))
    for dim, token in _split_dim_arg(getattr(args, "collapse", "") or ""):
        universe = table.universe(dim)
        target = collapsed_a if dim == DIM_A else collapsed_b
        if token == "*":
            target.update(range(len(universe)))
        else:
            target.add(universe.index(token))

    cap_a, cap_b = config.cap_a, config.cap_b
    for dim, token in _split_dim_arg(getattr(args, "cap", "") or ""):
        if dim == DIM_A:
            cap_a = int(token)
        else:
            cap_b = int(token)

    show_a, show_b = config.show_empty_a, config.show_empty_b
    for dim, token in _split_dim_arg(getattr(args, "show_empty", "") or ""):
        flag = token.lower() in ("1", "true", "yes", "on")
        if dim == DIM_A:
            show_a = flag
        else:
            show_b = flag

    return ViewConfig(
        counting=getattr(args, "counting", None) or config.counting,
        cap_a=cap_a,
        cap_b=cap_b,
        collapsed_a=frozenset(collapsed_a),
        collapsed_b=frozenset(collapsed_b),
        show_empty_a=show_a,
        show_empty_b=show_b,
        transform=getattr(args, "transform", None) or config.transform,
        color_scale=getattr(args, "color_scale", None) or config.color_scale,
    )


def _write_output(args, data: bytes):
    if getattr(args, "output", None):
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.buffer.write(b"\n")


def _cmd_generate(args) -> int:
    if args.variant == "drives":
        rules = None
        if args.rules:
            rules = _rules_from_json(json.loads(Path(args.rules).read_text("utf-8")))
        table = gen_drives(args.n, args.seed, rules)
    else:
        table = gen_s(SVariantSpec(args.variant, args.n, args.seed))
    fmt = "json" if (args.output or "").endswith(".json") else "csv"
    _write_output(args, write_table(table, fmt))
    return 0


def _cmd_aggregate(args) -> int:
    table = _load_table(args)
    config = _build_config(args, table)
    result = aggregate(table, config)
    if args.format == "csv":
        _write_output(args, write_aggregate(result, "csv"))
        return 0
    payload = {"aggregate": aggregate_to_json(result), "rank": None, "deviation": None}
    if config.transform == "rank-std":
        payload["rank"] = rank_to_json(result, rank_transform(result, "standard"))
    elif config.transform == "rank-dense":
        payload["rank"] = rank_to_json(result, rank_transform(result, "dense"))
    elif config.transform == "deviation":
        payload["deviation"] = deviation_to_json(result, deviation_transform(result))
    _write_output(args, canonical_json(payload))
    return 0


def _cmd_detail(args) -> int:
    table = _load_table(args)
    config = _build_config(args, table)
    pairs = dict(_split_dim_arg(args.select))
    if DIM_A not in pairs or DIM_B not in pairs:
        raise InvalidConfigError("--select needs both dimensions, e.g. A:Music,B:Fun")
    selection = detail_selection_from_json(
        {"a": pairs[DIM_A], "b": pairs[DIM_B], "config": {}}, table
    )
    selection = selection.__class__(selection.e_a, selection.e_b, config)
    result = detail_views(table, selection)
    _write_output(args, canonical_json(detail_to_json(result, table)))
    return 0


def _parse_cell_arg(text: str, table: SetPairTable):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (2, 4):
        raise InvalidConfigError("--cell is COL,ROW or COL,ROW,K,L ('-' for the empty set)")
    obj = {
        "col": None if parts[0] in ("-", "∅", "") else parts[0],
        "row": None if parts[1] in ("-", "∅", "") else parts[1],
        "k": None,
        "l": None,
    }
    if len(parts) == 4:
        obj["k"] = None if parts[2] in ("-", "") else int(parts[2])
        obj["l"] = None if parts[3] in ("-", "") else int(parts[3])
    return cell_from_json(obj, table.universe_a, table.universe_b)


def _cmd_combinations(args) -> int:
    table = _load_table(args)
    config = _build_config(args, table)
    cell = _parse_cell_arg(args.cell, table)
    combos = enumerate_combinations(table, config, cell)
    if args.output:
        _write_output(args, canonical_json(combinations_to_json(combos, table)))
        return 0
    # Tooltip layout: aggregation rule, exact total, then combinations
    # ranked by item count.
    total = combos.total_value
    print(f"rule: {combos.rule_label}")
    print(f"total: {total.numerator}/{total.denominator} = {decimal_str(total)}")
    for entry in combos.entries:
        names_a = ";".join(entry.set_a.names(table.universe_a)) or "∅"
        names_b = ";".join(entry.set_b.names(table.universe_b)) or "∅"
        print(f"{entry.item_count:>8}  {names_b} | {names_a}")
    return 0


def _cmd_render(args) -> int:
    table = _load_table(args)
    config = _build_config(args, table)
    spec = SvgRenderSpec(cell_pixel=args.cell_pixel)
    overlay = None
    if args.brush:
        brush = brush_from_json(json.loads(Path(args.brush).read_text("utf-8")), table)
        overlay = brushed_aggregate(table, config, brush)
        result = overlay.base
    else:
        result = aggregate(table, config)
    _write_output(args, render_svg(result, overlay, spec))
    return 0


def _cmd_serve(args) -> int:
    from .service import run

    run(host=args.host, port=args.port, data_dir=args.data_dir, ui_dir=args.ui_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setxtab",
        description="Cross-tabulate data with two set-valued columns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", "-i", required=True, help="dataset file (CSV or JSON)")
            p.add_argument("--column-a", help="name of the first set column")
            p.add_argument("--column-b", help="name of the second set column")
            p.add_argument("--set-delimiter", default=";", help="separator inside set cells")
        p.add_argument("--output", "-o", help="output file (default stdout)")

    def add_view(p):
        p.add_argument("--config", help="view config JSON file (flags override fields)")
        p.add_argument("--counting", choices=["item", "element"])
        p.add_argument("--transform", choices=["raw", "rank-std", "rank-dense", "deviation"])
        p.add_argument("--color-scale", choices=["emphasize-low", "neutral", "emphasize-high", "divergent"])
        p.add_argument("--collapse", help="collapse elements, e.g. A:Music,B:Loud (A:* for all)")
        p.add_argument("--collapse-all", action="store_true", help="collapse every element")
        p.add_argument("--cap", help="cardinality caps, e.g. A:3,B:2")
        p.add_argument("--negate", help="negate elements, e.g. B:Loud")
        p.add_argument("--show-empty", help="empty-set visibility, e.g. A:false,B:true")
        p.add_argument("--reorder", help="display order, e.g. A:Traffic;Music;Family")

    p = sub.add_parser("generate", help="write a synthetic dataset")
    p.add_argument("--variant", required=True,
                   choices=["S1", "S2", "S3", "S4", "S5", "S6", "drives"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rules", help="drive rule table JSON (drives variant only)")
    add_io(p, needs_input=False)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("aggregate", help="cross-tabulate a dataset")
    add_io(p)
    add_view(p)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("detail", help="detail views for a selected heatmap")
    add_io(p)
    add_view(p)
    p.add_argument("--select", required=True, help="heatmap to expand, e.g. A:Music,B:Fun")
    p.set_defaults(func=_cmd_detail)

    p = sub.add_parser("combinations", help="ranked combination list for one cell")
    add_io(p)
    add_view(p)
    p.add_argument("--cell", required=True, help="COL,ROW or COL,ROW,K,L ('-' = empty set)")
    p.set_defaults(func=_cmd_combinations)

    p = sub.add_parser("render", help="render a view to SVG")
    add_io(p)
    add_view(p)
    p.add_argument("--cell-pixel", type=int, default=14)
    p.add_argument("--brush", help="brush JSON file for a red overlay")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", help="directory for dataset persistence")
    p.add_argument("--ui-dir", help="serve the built front end from this directory at /ui")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SetXTabError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error [FileNotFound]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
