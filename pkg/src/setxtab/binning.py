"""Exact-rational cross-tabulation of two set-valued columns.

The aggregate is a grid of small heatmaps, one per element pair: within the
heatmap for elements (a, b), cell (k, l) holds the items whose a-side set
contains ``a`` with k extra elements and whose b-side set contains ``b``
with l extra elements.  Empty sets get a dedicated column/row.  Item-centric
counting splits each item's unit weight evenly over the m*n cells it
touches, so all values are exact rationals; element-centric counting scores
every touched cell 1.

The scan itself is pure integer counting over the table's distinct
(set, set) pairs; rationals only appear when bins are divided by their
cardinalities and merged, so results are bit-exact and independent of item
order or partitioning.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidCapError, InvalidConfigError, UniverseMismatchError
from .model import (
    DIM_A,
    DIM_B,
    ElementUniverse,
    SetPairTable,
    SetValue,
    iter_bits,
)

ITEM_CENTRIC = "item"
ELEMENT_CENTRIC = "element"

TRANSFORMS = ("raw", "rank-std", "rank-dense", "deviation")

ZERO = Fraction(0)


@dataclass(frozen=True)
class CellKey:
    """Grid coordinate: (column element, row element, cardinality bins).

    ``col``/``row`` are element indices, or ``None`` for the empty-set
    column/row.  ``k``/``l`` are cardinality bin indices (bin k holds sets
    of cardinality k+1); ``None`` when the axis has no cardinality
    resolution (empty-set axis, or a collapsed element).
    """

    col: int | None
    row: int | None
    k: int | None = None
    l: int | None = None


@dataclass(frozen=True)
class AxisBin:
    """One cardinality bin of an element's row/column axis."""

    index: int | None          # bin index (None = single collapsed bin)
    cards: tuple[int, ...]     # cardinalities folded into this bin
    merged: bool               # more than one cardinality folded
    suffix: str                # label suffix: "", "+1", "+2…"


@dataclass(frozen=True)
class MarginalBin:
    """One bin of a marginal histogram."""

    value: Fraction
    item_count: int
    display_as_fraction: bool
    denominator: int | None = None  # cardinality shown under the fraction bar


@dataclass(frozen=True)
class ViewConfig:
    """Aggregation-level state: counting mode, caps, collapses, visibility."""

    counting: str = ITEM_CENTRIC
    cap_a: int | None = None
    cap_b: int | None = None
    collapsed_a: frozenset[int] = frozenset()
    collapsed_b: frozenset[int] = frozenset()
    show_empty_a: bool = True
    show_empty_b: bool = True
    transform: str = "raw"
    color_scale: str = "neutral"

    def __post_init__(self):
        if self.counting not in (ITEM_CENTRIC, ELEMENT_CENTRIC):
            raise InvalidConfigError(f"unknown counting mode {self.counting!r}")
        if self.transform not in TRANSFORMS:
            raise InvalidConfigError(f"unknown transform {self.transform!r}")
        for cap in (self.cap_a, self.cap_b):
            if cap is not None and cap < 1:
                raise InvalidCapError(f"cardinality cap must be >= 1, got {cap}")
        object.__setattr__(self, "collapsed_a", frozenset(self.collapsed_a))
        object.__setattr__(self, "collapsed_b", frozenset(self.collapsed_b))

    def cap(self, dim: str) -> int | None:
        return self.cap_a if dim == DIM_A else self.cap_b

    def collapsed(self, dim: str) -> frozenset[int]:
        return self.collapsed_a if dim == DIM_A else self.collapsed_b

    def show_empty(self, dim: str) -> bool:
        return self.show_empty_a if dim == DIM_A else self.show_empty_b


def apply_cap(config_or_result, dim: str, t: int) -> ViewConfig:
    """Return a config with the cardinality cap of one dimension set to t."""
    config = config_or_result.config if isinstance(config_or_result, AggregateResult) else config_or_result
    if t < 1:
        raise InvalidCapError(f"cardinality cap must be >= 1, got {t}")
    if dim == DIM_A:
        return replace(config, cap_a=t)
    if dim == DIM_B:
        return replace(config, cap_b=t)
    raise InvalidConfigError(f"unknown dimension {dim!r}")


def element_bins(size: int, cap: int | None, collapsed: bool) -> list[AxisBin]:
    """Cardinality bins for one element's axis under cap/collapse state."""
    if collapsed:
        return [AxisBin(None, tuple(range(1, size + 1)), size > 1, "")]
    bins = []
    top = size - 1 if cap is None else min(cap, size - 1)
    for k in range(top + 1):
        if k == top and top < size - 1:
            cards = tuple(range(k + 1, size + 1))
            bins.append(AxisBin(k, cards, True, f"+{k}…"))
        else:
            suffix = "" if k == 0 else f"+{k}"
            bins.append(AxisBin(k, (k + 1,), False, suffix))
    return bins


def axis_layout(
    universe: ElementUniverse, cap: int | None, collapsed: frozenset[int]
) -> list[tuple[int | None, list[AxisBin]]]:
    """Axis entries in canonical presentation order: empty set first, then
    elements by display order.  The empty-set entry is always present;
    visibility is the renderer's concern."""
    layout: list[tuple[int | None, list[AxisBin]]] = [(None, [AxisBin(None, (0,), False, "∅")])]
    for idx in universe.display_order:
        layout.append((idx, element_bins(len(universe), cap, idx in collapsed)))
    return layout


def bin_label(universe: ElementUniverse, element: int | None, axis_bin: AxisBin) -> str:
    """Full bin label, e.g. "Music", "Music+2", "Music+1…", "∅".

    Axis ticks use the bare ``suffix`` instead; this form names the bin on
    its own (rule labels, tooltips).
    """
    if element is None:
        return "∅"
    base = universe.label(element)
    if axis_bin.index is None:
        return base + ("…" if axis_bin.merged else "")
    if axis_bin.index == 0:
        return base
    return base + axis_bin.suffix


@dataclass(frozen=True)
class AggregateResult:
    """The full grid plus both marginal histograms, all exact rationals.

    ``cells`` is dense over every key the config's grid contains, zeros
    included; ``empty_flags`` is exactly the zero-valued subset.  The
    empty-set column/row is always computed; ``config.show_empty_*`` only
    governs presentation.
    """

    universe_a: ElementUniverse
    universe_b: ElementUniverse
    config: ViewConfig
    n: int
    cells: Mapping[CellKey, Fraction]
    marginal_a: Mapping[tuple[int | None, int | None], MarginalBin]
    marginal_b: Mapping[tuple[int | None, int | None], MarginalBin]
    total: Fraction
    empty_flags: frozenset[CellKey] = field(default_factory=frozenset)

    def universe(self, dim: str) -> ElementUniverse:
        return self.universe_a if dim == DIM_A else self.universe_b

    def layout(self, dim: str) -> list[tuple[int | None, list[AxisBin]]]:
        u = self.universe(dim)
        return axis_layout(u, self.config.cap(dim), self.config.collapsed(dim))

    def bins_for(self, dim: str, element: int | None) -> list[AxisBin]:
        if element is None:
            return [AxisBin(None, (0,), False, "∅")]
        u = self.universe(dim)
        return element_bins(len(u), self.config.cap(dim), element in self.config.collapsed(dim))

    def grid_keys(self) -> Iterable[CellKey]:
        """All cell keys in canonical order (empty first, display order)."""
        for col, col_bins in self.layout(DIM_A):
            for row, row_bins in self.layout(DIM_B):
                for cb in col_bins:
                    for rb in row_bins:
                        yield CellKey(
                            col,
                            row,
                            cb.index if col is not None else None,
                            rb.index if row is not None else None,
                        )

    def value(self, key: CellKey) -> Fraction:
        return self.cells[key]


def cell_contributions(
    s_a: SetValue, s_b: SetValue, counting: str = ITEM_CENTRIC
) -> list[tuple[CellKey, Fraction]]:
    """Full-resolution grid contributions of a single item.

    Item-centric: an item with m a-elements and n b-elements lands in the
    m*n touched cells with weight 1/(m*n) each (empty sides fall back to
    the empty-set axis, keeping the item's total weight exactly 1).
    Element-centric: the same keys, each with weight 1.
    """
    m = s_a.cardinality
    n = s_b.cardinality
    weight = Fraction(1) if counting == ELEMENT_CENTRIC else Fraction(1, max(m, 1) * max(n, 1))
    cols = s_a.indices() or [None]
    rows = s_b.indices() or [None]
    out = []
    for a in cols:
        for b in rows:
            out.append(
                (
                    CellKey(
                        a,
                        b,
                        m - 1 if a is not None else None,
                        n - 1 if b is not None else None,
                    ),
                    weight,
                )
            )
    return out


def _int_counts(table: SetPairTable, mask: np.ndarray | None):
    """Integer scan: full-resolution cell counts and marginal item counts.

    Returns (cnt, marg_a, marg_b) where cnt maps (a, b, m, n) -> items
    (a or b is -1 for the empty-set axis, with m or n 0 accordingly) and
    marg_* map (element-or-minus-one, cardinality) -> items.
    """
    if mask is None:
        pairs, counts = table.pair_histogram()
    else:
        selected = np.stack([table.bits_a[mask], table.bits_b[mask]], axis=1)
        if len(selected):
            pairs, counts = np.unique(selected, axis=0, return_counts=True)
        else:
            pairs = np.empty((0, 2), dtype=np.uint64)
            counts = np.empty(0, dtype=np.int64)

    cnt: dict[tuple[int, int, int, int], int] = {}
    marg_a: dict[tuple[int, int], int] = {}
    marg_b: dict[tuple[int, int], int] = {}
    for row in range(len(counts)):
        ba = int(pairs[row, 0])
        bb = int(pairs[row, 1])
        c = int(counts[row])
        m = ba.bit_count()
        n = bb.bit_count()
        cols = list(iter_bits(ba)) if ba else [-1]
        rows = list(iter_bits(bb)) if bb else [-1]
        for a in cols:
            key_a = (a, m)
            marg_a[key_a] = marg_a.get(key_a, 0) + c
            for b in rows:
                key = (a, b, m, n)
                cnt[key] = cnt.get(key, 0) + c
        for b in rows:
            key_b = (b, n)
            marg_b[key_b] = marg_b.get(key_b, 0) + c
    return cnt, marg_a, marg_b


def _check_config(table: SetPairTable, config: ViewConfig) -> None:
    for idx in config.collapsed_a:
        if not 0 <= idx < len(table.universe_a):
            raise UniverseMismatchError(f"collapsed a-element {idx} out of range")
    for idx in config.collapsed_b:
        if not 0 <= idx < len(table.universe_b):
            raise UniverseMismatchError(f"collapsed b-element {idx} out of range")


def _marginals(
    universe: ElementUniverse,
    cap: int | None,
    collapsed: frozenset[int],
    marg: Mapping[tuple[int, int], int],
    item_centric: bool,
) -> dict[tuple[int | None, int | None], MarginalBin]:
    out: dict[tuple[int | None, int | None], MarginalBin] = {}
    empty_count = marg.get((-1, 0), 0)
    # Empty-set bin: whole items; element-centric occurrences are zero.
    out[(None, None)] = MarginalBin(
        Fraction(empty_count) if item_centric else ZERO, empty_count, False, None
    )
    for e in range(len(universe)):
        for b in element_bins(len(universe), cap, e in collapsed):
            count = 0
            value = ZERO
            for card in b.cards:
                c = marg.get((e, card), 0)
                count += c
                value += Fraction(c, card) if item_centric else Fraction(c)
            out[(e, b.index)] = MarginalBin(
                value,
                count,
                item_centric and not b.merged,
                b.cards[0] if not b.merged else None,
            )
    return out


def aggregate(
    table: SetPairTable, config: ViewConfig, mask: np.ndarray | None = None
) -> AggregateResult:
    """Cross-tabulate the table under a view config.

    Single integer-counting pass over distinct value pairs, then exact
    rational division/merging per the config's caps and collapses.  The
    optional boolean ``mask`` restricts the scan to selected items (used
    for brushing overlays); everything else is identical.
    """
    _check_config(table, config)
    item_centric = config.counting == ITEM_CENTRIC
    cnt, marg_a_int, marg_b_int = _int_counts(table, mask)

    bins_a = {
        e: element_bins(len(table.universe_a), config.cap_a, e in config.collapsed_a)
        for e in range(len(table.universe_a))
    }
    bins_b = {
        e: element_bins(len(table.universe_b), config.cap_b, e in config.collapsed_b)
        for e in range(len(table.universe_b))
    }
    # card -> bin index lookup per element axis
    bin_of_a = {e: {c: b.index for b in bins for c in b.cards} for e, bins in bins_a.items()}
    bin_of_b = {e: {c: b.index for b in bins for c in b.cards} for e, bins in bins_b.items()}

    cells: dict[CellKey, Fraction] = {}
    for col in [None, *range(len(table.universe_a))]:
        for row in [None, *range(len(table.universe_b))]:
            for cb in bins_a[col] if col is not None else [None]:
                for rb in bins_b[row] if row is not None else [None]:
                    cells[
                        CellKey(
                            col,
                            row,
                            cb.index if cb is not None else None,
                            rb.index if rb is not None else None,
                        )
                    ] = ZERO

    for (a, b, m, n), c in cnt.items():
        key = CellKey(
            a if a >= 0 else None,
            b if b >= 0 else None,
            bin_of_a[a][m] if a >= 0 else None,
            bin_of_b[b][n] if b >= 0 else None,
        )
        weight = Fraction(c) if not item_centric else Fraction(c, max(m, 1) * max(n, 1))
        cells[key] += weight

    marginal_a = _marginals(
        table.universe_a, config.cap_a, config.collapsed_a, marg_a_int, item_centric
    )
    marginal_b = _marginals(
        table.universe_b, config.cap_b, config.collapsed_b, marg_b_int, item_centric
    )

    n_items = int(mask.sum()) if mask is not None else table.n
    total = sum(cells.values(), ZERO)
    empty = frozenset(k for k, v in cells.items() if v == 0)
    return AggregateResult(
        universe_a=table.universe_a,
        universe_b=table.universe_b,
        config=config,
        n=n_items,
        cells=cells,
        marginal_a=marginal_a,
        marginal_b=marginal_b,
        total=total,
        empty_flags=empty,
    )
