"""Detail-on-demand: per-cell histograms, detail heatmaps, combination lists.

Everything here rescans the immutable table for the few cells involved;
the engine stores no per-cell item lists.  Detail counts are raw integer
item counts (each qualifying item counted once per element / per pair),
unlike the fractional weights of the main grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .binning import (
    AxisBin,
    CellKey,
    ELEMENT_CENTRIC,
    ViewConfig,
    bin_label,
    element_bins,
)
from .errors import InvalidKeyError, InvalidSelectionError
from .model import DIM_A, DIM_B, SetPairTable, SetValue, popcount64


@dataclass(frozen=True)
class DetailSelection:
    """A selected element-pair heatmap to expand."""

    e_a: int
    e_b: int
    config: ViewConfig = ViewConfig()


@dataclass(frozen=True)
class DetailCell:
    """Detail counts for one cardinality cell of the selected heatmap."""

    hist_a: tuple[int, ...]          # per a-element qualifying-item counts
    hist_b: tuple[int, ...]
    heat: tuple[tuple[int, ...], ...]  # |A| x |B| co-membership counts
    item_count: int


@dataclass(frozen=True)
class DetailResult:
    selection: DetailSelection
    per_cell: Mapping[tuple[int | None, int | None], DetailCell]


@dataclass(frozen=True)
class CombinationEntry:
    set_a: SetValue
    set_b: SetValue
    item_count: int
    weight: Fraction  # per-item contribution to the cell under the config


@dataclass(frozen=True)
class CombinationList:
    """Exhaustive contributing (set, set) pairs of one cell, ranked."""

    cell: CellKey
    rule_label: str
    total_value: Fraction
    entries: tuple[CombinationEntry, ...]


def _bins_for(table: SetPairTable, config: ViewConfig, dim: str, element: int) -> list[AxisBin]:
    size = len(table.universe(dim))
    return element_bins(size, config.cap(dim), element in config.collapsed(dim))


def _presence(bits: np.ndarray, size: int) -> np.ndarray:
    """N x size boolean membership matrix."""
    if size == 0:
        return np.zeros((len(bits), 0), dtype=bool)
    shifts = np.arange(size, dtype=np.uint64)
    return ((bits[:, None] >> shifts[None, :]) & np.uint64(1)).astype(bool)


def detail_views(table: SetPairTable, selection: DetailSelection) -> DetailResult:
    """Expand one heatmap into per-cell element histograms and heatmaps.

    A cell's qualifying items are those that land in it: they contain both
    selected elements with cardinalities matching the cell's (possibly
    merged) bins.  Collapsed or capped selections inherit the merged
    structure, so the detail grid always mirrors the visible heatmap.
    """
    size_a = len(table.universe_a)
    size_b = len(table.universe_b)
    if not (0 <= selection.e_a < size_a and 0 <= selection.e_b < size_b):
        raise InvalidSelectionError(
            f"selection ({selection.e_a}, {selection.e_b}) out of range"
        )
    cfg = selection.config
    bins_a = _bins_for(table, cfg, DIM_A, selection.e_a)
    bins_b = _bins_for(table, cfg, DIM_B, selection.e_b)

    card_a = popcount64(table.bits_a)
    card_b = popcount64(table.bits_b)
    has_a = ((table.bits_a >> np.uint64(selection.e_a)) & np.uint64(1)).astype(bool)
    has_b = ((table.bits_b >> np.uint64(selection.e_b)) & np.uint64(1)).astype(bool)
    both = has_a & has_b

    per_cell: dict[tuple[int | None, int | None], DetailCell] = {}
    for ba in bins_a:
        in_a = both & np.isin(card_a, ba.cards)
        for bb in bins_b:
            mask = in_a & np.isin(card_b, bb.cards)
            pres_a = _presence(table.bits_a[mask], size_a)
            pres_b = _presence(table.bits_b[mask], size_b)
            hist_a = pres_a.sum(axis=0, dtype=np.int64)
            hist_b = pres_b.sum(axis=0, dtype=np.int64)
            heat = pres_a.astype(np.int64).T @ pres_b.astype(np.int64)
            per_cell[(ba.index, bb.index)] = DetailCell(
                tuple(int(x) for x in hist_a),
                tuple(int(x) for x in hist_b),
                tuple(tuple(int(x) for x in row) for row in heat),
                int(mask.sum()),
            )
    return DetailResult(selection, per_cell)


def _cell_cards(
    table: SetPairTable, config: ViewConfig, cell: CellKey
) -> tuple[Sequence[int], Sequence[int]]:
    """Cardinality sets a cell covers under the config; validates the key."""

    def resolve(dim: str, element: int | None, idx: int | None) -> Sequence[int]:
        if element is None:
            if idx is not None:
                raise InvalidKeyError("empty-set axis carries no cardinality index")
            return (0,)
        size = len(table.universe(dim))
        if not 0 <= element < size:
            raise InvalidKeyError(f"element {element} out of range for dimension {dim}")
        for axis_bin in _bins_for(table, config, dim, element):
            if axis_bin.index == idx:
                return axis_bin.cards
        raise InvalidKeyError(f"cardinality bin {idx} not in grid for dimension {dim}")

    return resolve(DIM_A, cell.col, cell.k), resolve(DIM_B, cell.row, cell.l)


def cell_mask(table: SetPairTable, config: ViewConfig, cell: CellKey) -> np.ndarray:
    """Boolean mask of the items contributing to a grid cell."""
    cards_a, cards_b = _cell_cards(table, config, cell)
    if cell.col is None:
        mask_a = table.bits_a == 0
    else:
        mask_a = ((table.bits_a >> np.uint64(cell.col)) & np.uint64(1)).astype(bool)
        mask_a &= np.isin(popcount64(table.bits_a), cards_a)
    if cell.row is None:
        mask_b = table.bits_b == 0
    else:
        mask_b = ((table.bits_b >> np.uint64(cell.row)) & np.uint64(1)).astype(bool)
        mask_b &= np.isin(popcount64(table.bits_b), cards_b)
    return mask_a & mask_b


def rule_label(table: SetPairTable, config: ViewConfig, cell: CellKey) -> str:
    """Human-readable aggregation rule, row side first: "Fun+2 vs Music+1"."""

    def side(dim: str, element: int | None, idx: int | None) -> str:
        if element is None:
            return "∅"
        for axis_bin in _bins_for(table, config, dim, element):
            if axis_bin.index == idx:
                return bin_label(table.universe(dim), element, axis_bin)
        raise InvalidKeyError(f"cardinality bin {idx} not in grid for dimension {dim}")

    return f"{side(DIM_B, cell.row, cell.l)} vs {side(DIM_A, cell.col, cell.k)}"


def enumerate_combinations(
    table: SetPairTable, config: ViewConfig, cell: CellKey
) -> CombinationList:
    """All contributing (set, set) combinations of one cell, ranked.

    Entries are sorted by item count descending, ties by the pair's bit
    patterns, and always returned in full; truncation is a UI concern.
    The weighted entry counts reconstruct the cell value exactly.
    """
    mask = cell_mask(table, config, cell)
    pairs_a = table.bits_a[mask]
    pairs_b = table.bits_b[mask]
    if len(pairs_a):
        stacked = np.stack([pairs_a, pairs_b], axis=1)
        uniq, counts = np.unique(stacked, axis=0, return_counts=True)
    else:
        uniq = np.empty((0, 2), dtype=np.uint64)
        counts = np.empty(0, dtype=np.int64)

    element_centric = config.counting == ELEMENT_CENTRIC
    entries = []
    total = Fraction(0)
    for row in range(len(counts)):
        bits_a = int(uniq[row, 0])
        bits_b = int(uniq[row, 1])
        count = int(counts[row])
        m = bits_a.bit_count()
        n = bits_b.bit_count()
        weight = Fraction(1) if element_centric else Fraction(1, max(m, 1) * max(n, 1))
        total += count * weight
        entries.append(
            CombinationEntry(
                SetValue(bits_a, len(table.universe_a)),
                SetValue(bits_b, len(table.universe_b)),
                count,
                weight,
            )
        )
    entries.sort(key=lambda e: (-e.item_count, e.set_a.bits, e.set_b.bits))
    return CombinationList(
        cell=cell,
        rule_label=rule_label(table, config, cell),
        total_value=total,
        entries=tuple(entries),
    )
