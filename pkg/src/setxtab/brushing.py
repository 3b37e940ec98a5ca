"""Item-selection predicates and brushed-overlay aggregation.

Brushes are Boolean predicate trees over items (never over bins), so any
selection composes with any view: the overlay simply reruns the engine on
the selected items.  Leaves that reference cells or marginal bins capture
the config they were defined under, keeping their meaning stable when the
view is later collapsed or capped differently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .binning import AggregateResult, CellKey, ViewConfig, aggregate, element_bins
from .drilldown import cell_mask
from .errors import InvalidReferenceError, SetXTabError
from .model import DIM_A, DIM_B, SetPairTable, popcount64


class Brush:
    """Base predicate node; subclasses implement the vectorized mask."""

    def mask(self, table: SetPairTable) -> np.ndarray:
        raise NotImplementedError


def _dim_ok(dim: str) -> str:
    if dim not in (DIM_A, DIM_B):
        raise InvalidReferenceError(f"unknown dimension {dim!r}")
    return dim


def _presence_mask(table: SetPairTable, dim: str, element: int) -> np.ndarray:
    universe = table.universe(dim)
    if not 0 <= element < len(universe):
        raise InvalidReferenceError(
            f"element index {element} out of range for dimension {dim}"
        )
    return ((table.bits(dim) >> np.uint64(element)) & np.uint64(1)).astype(bool)


@dataclass(frozen=True)
class ElementPresent(Brush):
    dim: str
    element: int

    def mask(self, table):
        return _presence_mask(table, _dim_ok(self.dim), self.element)


@dataclass(frozen=True)
class CardinalityIs(Brush):
    dim: str
    card: int

    def mask(self, table):
        return popcount64(table.bits(_dim_ok(self.dim))) == self.card


@dataclass(frozen=True)
class CardinalityAtLeast(Brush):
    dim: str
    card: int

    def mask(self, table):
        return popcount64(table.bits(_dim_ok(self.dim))) >= self.card


@dataclass(frozen=True)
class HeatmapMember(Brush):
    """Membership in one element-pair heatmap: both anchors present."""

    e_a: int
    e_b: int

    def mask(self, table):
        return _presence_mask(table, DIM_A, self.e_a) & _presence_mask(table, DIM_B, self.e_b)


@dataclass(frozen=True)
class CellMember(Brush):
    """Membership in one grid cell under the captured config."""

    cell: CellKey
    config: ViewConfig = ViewConfig()

    def mask(self, table):
        try:
            return cell_mask(table, self.config, self.cell)
        except SetXTabError as exc:
            raise InvalidReferenceError(str(exc)) from exc


@dataclass(frozen=True)
class MarginalBinMember(Brush):
    """Membership in one marginal histogram bin (one dimension only)."""

    dim: str
    element: int | None
    card_idx: int | None = None
    config: ViewConfig = ViewConfig()

    def mask(self, table):
        dim = _dim_ok(self.dim)
        bits = table.bits(dim)
        if self.element is None:
            return bits == 0
        present = _presence_mask(table, dim, self.element)
        size = len(table.universe(dim))
        collapsed = self.element in self.config.collapsed(dim)
        for axis_bin in element_bins(size, self.config.cap(dim), collapsed):
            if axis_bin.index == self.card_idx:
                return present & np.isin(popcount64(bits), axis_bin.cards)
        raise InvalidReferenceError(
            f"cardinality bin {self.card_idx} not in marginal for dimension {dim}"
        )


@dataclass(frozen=True)
class ItemIdIn(Brush):
    ids: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "ids", frozenset(self.ids))

    def mask(self, table):
        out = np.zeros(table.n, dtype=bool)
        valid = [i for i in self.ids if 0 <= i < table.n]
        if valid:
            out[valid] = True
        return out


@dataclass(frozen=True)
class And(Brush):
    children: tuple[Brush, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def mask(self, table):
        out = np.ones(table.n, dtype=bool)
        for child in self.children:
            out &= child.mask(table)
        return out


@dataclass(frozen=True)
class Or(Brush):
    children: tuple[Brush, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def mask(self, table):
        out = np.zeros(table.n, dtype=bool)
        for child in self.children:
            out |= child.mask(table)
        return out


@dataclass(frozen=True)
class Not(Brush):
    child: Brush

    def mask(self, table):
        return ~self.child.mask(table)


def evaluate_brush(brush: Brush, table: SetPairTable, item: int) -> bool:
    """Evaluate the predicate for a single item id."""
    if not 0 <= item < table.n:
        raise InvalidReferenceError(f"item id {item} out of range")
    return bool(brush.mask(table)[item])


@dataclass(frozen=True)
class BrushOverlay:
    """A brushed aggregate next to its unrestricted base."""

    base: AggregateResult
    brushed: AggregateResult
    mask: np.ndarray = field(repr=False)

    @property
    def item_ids(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.mask)[0]]


def brushed_aggregate(
    table: SetPairTable, config: ViewConfig, brush: Brush
) -> BrushOverlay:
    """Aggregate the brushed items with the identical pipeline as the base."""
    mask = brush.mask(table)
    return BrushOverlay(
        base=aggregate(table, config),
        brushed=aggregate(table, config, mask=mask),
        mask=mask,
    )
