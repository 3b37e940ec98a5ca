"""Static SVG export of a cross-tabulation view.

Output is deterministic byte-for-byte: pure string building, fixed float
formatting, canonical element ordering.  Anatomy follows the interactive
view: heatmap grid (empty-set column/row outermost), marginal bars on top
and right with fraction or decimal labels, a dedicated crossed-out style
for empty bins, and optional red sub-bars sized by the brushed share.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .binning import AggregateResult, AxisBin, CellKey, bin_label
from .brushing import BrushOverlay
from .drilldown import DetailResult
from .errors import SpecError
from .io import marginal_label
from .model import DIM_A, DIM_B
from .transforms import (
    PRESETS,
    color_position,
    deviation_transform,
    rank_transform,
)

SEQ_LOW = (247, 251, 255)
SEQ_HIGH = (8, 48, 107)
RED_LOW = (255, 245, 240)
RED_HIGH = (103, 0, 13)
DIV_LOW = (178, 24, 43)       # under-represented
DIV_HIGH = (33, 102, 172)     # over-represented (blue end)
WHITE = (255, 255, 255)
EMPTY_FILL = "#fff9c4"
EMPTY_CROSS = "#c9b458"
GRID_STROKE = "#cccccc"

GROUP_GAP = 4
MARGIN_SIZE = 56
LABEL_GUTTER = 64
PAD = 10
FONT = "font-family=\"monospace\""


@dataclass(frozen=True)
class SvgRenderSpec:
    """Rendering parameters; heatmap cells may not go below 4x4 px."""

    cell_pixel: int = 14
    palette: str | None = None          # overrides the config's color preset
    show_labels: bool = True
    panels: tuple[str, ...] = ("grid", "marginals")

    def __post_init__(self):
        if self.cell_pixel < 4:
            raise SpecError(f"cell_pixel must be >= 4, got {self.cell_pixel}")
        for panel in self.panels:
            if panel not in ("grid", "marginals", "detail"):
                raise SpecError(f"unknown panel {panel!r}")


def _hex(rgb: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _lerp(c0, c1, t: float) -> tuple[int, int, int]:
    t = min(1.0, max(0.0, t))
    return tuple(round(a + (b - a) * t) for a, b in zip(c0, c1))


def seq_color(pos: float) -> str:
    return _hex(_lerp(SEQ_LOW, SEQ_HIGH, pos))


def red_color(pos: float) -> str:
    return _hex(_lerp(RED_LOW, RED_HIGH, pos))


def div_color(pos: float) -> str:
    if pos < 0.5:
        return _hex(_lerp(DIV_LOW, WHITE, pos * 2))
    return _hex(_lerp(WHITE, DIV_HIGH, (pos - 0.5) * 2))


def _f(x: float) -> str:
    return f"{x:.2f}"


class _Doc:
    def __init__(self):
        self.parts: list[str] = []

    def rect(self, x, y, w, h, fill, stroke=None, width=1.0):
        s = f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" fill="{fill}"'
        if stroke:
            s += f' stroke="{stroke}" stroke-width="{_f(width)}"'
        self.parts.append(s + "/>")

    def line(self, x1, y1, x2, y2, stroke, width=1.0):
        self.parts.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def text(self, x, y, content, size=9, anchor="middle", rotate=None):
        content = (
            content.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        )
        transform = f' transform="rotate({rotate} {_f(x)} {_f(y)})"' if rotate else ""
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" {FONT} '
            f'text-anchor="{anchor}"{transform}>{content}</text>'
        )


def _axis_slots(result: AggregateResult, dim: str, cell: int, reverse: bool):
    """Pixel offsets for every (element, bin) of one axis.

    Returns (slots, extent) where each slot is
    (element, AxisBin, offset) and offsets are in presentation order
    starting at 0.  The empty-set slot comes outermost (first column,
    top row); hidden empty sets are omitted.
    """
    layout = result.layout(dim)
    if not result.config.show_empty(dim):
        layout = [(e, bins) for e, bins in layout if e is not None]
    groups = [(e, bins) for e, bins in layout]
    if reverse:
        empty = [g for g in groups if g[0] is None]
        rest = [g for g in groups if g[0] is not None]
        groups = empty + rest[::-1]
    slots = []
    offset = 0.0
    for gi, (element, bins) in enumerate(groups):
        if gi:
            offset += GROUP_GAP
        ordered = bins if not reverse else bins[::-1]
        for b in ordered:
            slots.append((element, b, offset))
            offset += cell
    return slots, offset


def _cell_fill(result, key, transform, rank_map, dev_map, preset, vmax) -> str:
    if transform in ("rank-std", "rank-dense"):
        return seq_color(rank_map.position(key))
    if transform == "deviation":
        return div_color(dev_map.position(key))
    pos = color_position(float(result.cells[key]), 0.0, vmax, preset)
    return seq_color(pos)


def render_svg(
    result: AggregateResult,
    overlays: BrushOverlay | None = None,
    spec: SvgRenderSpec | None = None,
    detail: DetailResult | None = None,
) -> bytes:
    """Render the aggregate (and optional brush overlay) to SVG bytes."""
    spec = spec or SvgRenderSpec()
    cell = spec.cell_pixel
    config = result.config
    transform = config.transform
    preset = PRESETS.get(spec.palette or config.color_scale, PRESETS["neutral"])

    rank_map = None
    dev_map = None
    if transform == "rank-std":
        rank_map = rank_transform(result, "standard")
    elif transform == "rank-dense":
        rank_map = rank_transform(result, "dense")
    elif transform == "deviation" and result.n > 0:
        dev_map = deviation_transform(result)
    if transform == "deviation" and dev_map is None:
        transform = "raw"

    positive = [float(v) for v in result.cells.values() if v > 0]
    vmax = max(positive) if positive else 1.0

    cols, grid_w = _axis_slots(result, DIM_A, cell, reverse=False)
    rows, grid_h = _axis_slots(result, DIM_B, cell, reverse=True)

    show_marginals = "marginals" in spec.panels
    top = PAD + (MARGIN_SIZE if show_marginals else 0)
    left = PAD + LABEL_GUTTER
    width = left + grid_w + (MARGIN_SIZE if show_marginals else 0) + PAD + 40
    height = top + grid_h + 26 + PAD

    doc = _Doc()
    brushed = overlays.brushed if overlays is not None else None

    if "grid" in spec.panels:
        for col_e, cb, x0 in cols:
            for row_e, rb, y0 in rows:
                key = CellKey(
                    col_e,
                    row_e,
                    cb.index if col_e is not None else None,
                    rb.index if row_e is not None else None,
                )
                x = left + x0
                y = top + y0
                value = result.cells[key]
                if key in result.empty_flags:
                    doc.rect(x, y, cell, cell, EMPTY_FILL, GRID_STROKE, 0.5)
                    doc.line(x, y, x + cell, y + cell, EMPTY_CROSS, 1.0)
                    continue
                fill = _cell_fill(result, key, transform, rank_map, dev_map, preset, vmax)
                doc.rect(x, y, cell, cell, fill, GRID_STROKE, 0.5)
                if brushed is not None and value > 0:
                    share = float(brushed.cells[key] / value)
                    if share > 0:
                        pos = (
                            rank_map.position(key)
                            if rank_map
                            else dev_map.position(key)
                            if dev_map
                            else color_position(float(value), 0.0, vmax, preset)
                        )
                        h = cell * min(1.0, share)
                        doc.rect(x, y + cell - h, cell, h, red_color(pos))

    if show_marginals:
        _render_marginals(doc, result, brushed, cols, rows, left, top, grid_w, grid_h, cell, spec)

    if spec.show_labels:
        _render_labels(doc, result, cols, rows, left, top, grid_h, cell)

    body = "".join(doc.parts)
    if detail is not None and "detail" in spec.panels:
        extra, height = _render_detail(result, detail, left, height)
        body += extra

    header = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">'
        f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="#ffffff"/>'
    )
    return (header + body + "</svg>").encode("utf-8")


def _render_marginals(doc, result, brushed, cols, rows, left, top, grid_w, grid_h, cell, spec):
    bar_area = MARGIN_SIZE - 16
    for dim, slots in ((DIM_A, cols), (DIM_B, rows)):
        marginal = result.marginal_a if dim == DIM_A else result.marginal_b
        other = None
        if brushed is not None:
            other = brushed.marginal_a if dim == DIM_A else brushed.marginal_b
        shown = [
            (e, b) for e, b, _ in slots
        ]
        values = [float(marginal[(e, b.index if e is not None else None)].value) for e, b in shown]
        vmax = max(values) if any(values) else 1.0
        for (element, b, offset), value in zip(slots, values):
            key = (element, b.index if element is not None else None)
            mb = marginal[key]
            size = bar_area * (value / vmax) if vmax else 0.0
            if dim == DIM_A:
                x = left + offset
                y = top - 12 - size
                doc.rect(x + 1, y, cell - 2, size, seq_color(0.75), GRID_STROKE, 0.5)
                if other is not None and value > 0:
                    share = float(other[key].value) / value
                    if share > 0:
                        h = size * min(1.0, share)
                        doc.rect(x + 1, y + size - h, cell - 2, h, red_color(0.75))
                if spec.show_labels:
                    doc.text(x + cell / 2, y - 3, marginal_label(mb), size=7)
            else:
                x = left + grid_w + 12
                y = top + offset
                doc.rect(x, y + 1, size, cell - 2, seq_color(0.75), GRID_STROKE, 0.5)
                if other is not None and value > 0:
                    share = float(other[key].value) / value
                    if share > 0:
                        w = size * min(1.0, share)
                        doc.rect(x, y + 1, w, cell - 2, red_color(0.75))
                if spec.show_labels:
                    doc.text(x + size + 4, y + cell / 2 + 3, marginal_label(mb), size=7, anchor="start")


def _render_labels(doc, result, cols, rows, left, top, grid_h, cell):
    # One label per element group, plus bin suffixes when there is room.
    for dim, slots in ((DIM_A, cols), (DIM_B, rows)):
        universe = result.universe(dim)
        seen: dict[object, list] = {}
        for element, b, offset in slots:
            seen.setdefault(element, []).append((b, offset))
        for element, bins in seen.items():
            start = bins[0][1]
            end = bins[-1][1] + cell
            mid = (start + end) / 2
            if element is None:
                name = "∅"
            else:
                name = bin_label(universe, element, bins[0][0]) if len(bins) == 1 else universe.label(element)
            if dim == DIM_A:
                doc.text(left + mid, top + grid_h + 12, name, size=9)
                if len(bins) > 1 and cell >= 12:
                    for b, offset in bins:
                        if b.suffix:
                            doc.text(left + offset + cell / 2, top + grid_h + 23, b.suffix, size=7)
            else:
                doc.text(left - 6, top + mid + 3, name, size=9, anchor="end")
                if len(bins) > 1 and cell >= 12:
                    for b, offset in bins:
                        if b.suffix:
                            doc.text(left - 6, top + offset + cell / 2 + 3, b.suffix, size=6, anchor="end")


def _render_detail(result, detail, left, height):
    """Detail heatmaps panel: one mini co-membership matrix per cell."""
    mini = 4
    sel = detail.selection
    ua, ub = result.universe_a, result.universe_b
    bins_a = result.bins_for(DIM_A, sel.e_a)
    bins_b = result.bins_for(DIM_B, sel.e_b)
    peak = max(
        (max((max(r) for r in c.heat), default=0) for c in detail.per_cell.values()),
        default=0,
    )
    doc = _Doc()
    y_base = height + 8
    doc.text(left, y_base + 4, f"detail: {ua.label(sel.e_a)} vs {ub.label(sel.e_b)}", size=9, anchor="start")
    block_w = len(ua) * mini
    block_h = len(ub) * mini
    for bi, bb in enumerate(bins_b):
        for ai, ba in enumerate(bins_a):
            cell_detail = detail.per_cell[(ba.index, bb.index)]
            x0 = left + ai * (block_w + GROUP_GAP)
            y0 = y_base + 10 + bi * (block_h + GROUP_GAP)
            for a in range(len(ua)):
                for b in range(len(ub)):
                    count = cell_detail.heat[a][b]
                    fill = seq_color(count / peak) if peak else seq_color(0.0)
                    doc.rect(x0 + a * mini, y0 + b * mini, mini, mini, fill, GRID_STROKE, 0.25)
    new_height = y_base + 10 + len(bins_b) * (block_h + GROUP_GAP) + 8
    return "".join(doc.parts), new_height
