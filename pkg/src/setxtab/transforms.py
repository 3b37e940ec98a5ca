"""Value-to-display transforms: rank maps, deviation-from-expected, colors.

The deviation baseline assumes both set-valued columns draw uniformly and
independently over their full subset lattices; every grid cell then has a
closed-form expected value, and the display shows observed/expected on a
symmetric log scale (same proportional deviation at both ends).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .binning import (
    AggregateResult,
    CellKey,
    ELEMENT_CENTRIC,
    ITEM_CENTRIC,
    ViewConfig,
    element_bins,
)
from .errors import InvalidConfigError, InvalidKeyError

RANK_STANDARD = "standard"
RANK_DENSE = "dense"

# Narrowest allowed half-width of the divergent scale, in log10 units, so a
# degenerate all-ratios-equal grid still has a usable scale.
MIN_LOG_SPAN = 0.1


@dataclass(frozen=True)
class ColorScalePreset:
    """Nonlinear position mapping for a color ramp."""

    id: str
    gamma: float
    divergent: bool = False


PRESETS: dict[str, ColorScalePreset] = {
    "emphasize-low": ColorScalePreset("emphasize-low", 0.5),
    "neutral": ColorScalePreset("neutral", 1.0),
    "emphasize-high": ColorScalePreset("emphasize-high", 2.0),
    "divergent": ColorScalePreset("divergent", 1.0, divergent=True),
}


@dataclass(frozen=True)
class RankMap:
    """Cell ranks, 1 = largest value; zero-valued cells are excluded.

    Rank 1 maps to position 1.0 (darkest) by default; set ``invert`` for
    the opposite reading.
    """

    mode: str
    ranks: Mapping[CellKey, int]
    max_rank: int
    invert: bool = False

    def position(self, key: CellKey) -> float:
        rank = self.ranks[key]
        if self.max_rank <= 1:
            pos = 1.0
        else:
            pos = (self.max_rank - rank) / (self.max_rank - 1)
        return 1.0 - pos if self.invert else pos


@dataclass(frozen=True)
class DeviationMap:
    """Observed/expected ratios with a symmetric divergent scale.

    Cells with observed zero carry ratio 0 and are flagged so renderers can
    keep the dedicated empty style instead of the scale's low end.
    """

    ratios: Mapping[CellKey, float]
    flagged_zero: frozenset[CellKey]
    log_span: float

    def position(self, key: CellKey) -> float:
        ratio = self.ratios[key]
        if ratio <= 0.0:
            return 0.0
        pos = 0.5 + 0.5 * math.log10(ratio) / self.log_span
        return min(1.0, max(0.0, pos))


def rank_transform(
    result: AggregateResult, mode: str = RANK_STANDARD, invert: bool = False
) -> RankMap:
    """Rank all non-empty grid cells, largest value first.

    Ties share a rank; standard competition ranking skips the following
    ranks, dense ranking does not.  Ranking spans the whole visible grid
    jointly, not one heatmap at a time.
    """
    if mode not in (RANK_STANDARD, RANK_DENSE):
        raise InvalidConfigError(f"unknown ranking mode {mode!r}")
    valued = [(key, result.cells[key]) for key in result.grid_keys() if result.cells[key] > 0]
    valued.sort(key=lambda kv: kv[1], reverse=True)
    ranks: dict[CellKey, int] = {}
    max_rank = 0
    prev_value = None
    prev_rank = 0
    for pos, (key, value) in enumerate(valued, start=1):
        if value == prev_value:
            rank = prev_rank
        elif mode == RANK_STANDARD:
            rank = pos
        else:
            rank = prev_rank + 1
        ranks[key] = rank
        prev_value, prev_rank = value, rank
        max_rank = max(max_rank, rank)
    return RankMap(mode, ranks, max_rank, invert)


def _axis_factor(
    size: int,
    element: int | None,
    card_idx: int | None,
    cap: int | None,
    collapsed: bool,
    item_centric: bool,
) -> Fraction:
    """Expected per-item factor contributed by one axis of a cell key.

    For an element axis this is P(element present with the bin's
    cardinality), divided by the cardinality in item-centric mode; for the
    empty-set axis it is P(whole set empty).
    """
    denom = 1 << size
    if element is None:
        return Fraction(1, denom)
    for axis_bin in element_bins(size, cap, collapsed):
        if axis_bin.index == card_idx:
            total = Fraction(0)
            for card in axis_bin.cards:
                p = Fraction(math.comb(size - 1, card - 1), denom)
                total += p / card if item_centric else p
            return total
    raise InvalidKeyError(f"cardinality bin {card_idx} not in grid for element {element}")


def expected_cell_value(
    size_a: int,
    size_b: int,
    n: int,
    key: CellKey,
    counting: str = ITEM_CENTRIC,
    config: ViewConfig | None = None,
) -> Fraction:
    """Expected cell value under independent uniform subset draws (exact).

    Collapsed or capped keys get the sum of their constituent bins'
    expectations.  Summed over a full grid the item-centric expectations
    add up to n exactly.
    """
    config = config or ViewConfig(counting=counting)
    item_centric = counting != ELEMENT_CENTRIC
    if key.col is not None and not 0 <= key.col < size_a:
        raise InvalidKeyError(f"column element {key.col} out of range")
    if key.row is not None and not 0 <= key.row < size_b:
        raise InvalidKeyError(f"row element {key.row} out of range")
    if (key.col is None and key.k is not None) or (key.row is None and key.l is not None):
        raise InvalidKeyError("empty-set axes carry no cardinality index")
    factor_a = _axis_factor(
        size_a, key.col, key.k, config.cap_a, key.col in config.collapsed_a, item_centric
    )
    factor_b = _axis_factor(
        size_b, key.row, key.l, config.cap_b, key.row in config.collapsed_b, item_centric
    )
    return n * factor_a * factor_b


def deviation_transform(
    result: AggregateResult,
    expected: Callable[[CellKey], Fraction] | None = None,
) -> DeviationMap:
    """Per-cell observed/expected ratios plus the symmetric scale span."""
    if result.n <= 0:
        raise InvalidConfigError("deviation transform needs a non-empty table")
    size_a = len(result.universe_a)
    size_b = len(result.universe_b)

    def default_expected(key: CellKey) -> Fraction:
        return expected_cell_value(
            size_a, size_b, result.n, key, result.config.counting, result.config
        )

    expected_fn = expected or default_expected
    ratios: dict[CellKey, float] = {}
    flagged: set[CellKey] = set()
    span = MIN_LOG_SPAN
    for key in result.grid_keys():
        observed = result.cells[key]
        if observed == 0:
            ratios[key] = 0.0
            flagged.add(key)
            continue
        ratio = float(observed / expected_fn(key))
        ratios[key] = ratio
        span = max(span, abs(math.log10(ratio)))
    return DeviationMap(ratios, frozenset(flagged), span)


def color_position(
    value: float, vmin: float, vmax: float, preset: ColorScalePreset
) -> float:
    """Map a value into [0, 1] along a preset's ramp.

    Sequential presets apply a gamma to the normalized value.  The
    divergent preset interprets value/vmin/vmax as deviation ratios and
    centers ratio 1 at 0.5 with symmetric log scaling.
    """
    if preset.divergent:
        span = max(MIN_LOG_SPAN, abs(math.log10(vmin)) if vmin > 0 else 0.0,
                   abs(math.log10(vmax)) if vmax > 0 else 0.0)
        if value <= 0.0:
            return 0.0
        return min(1.0, max(0.0, 0.5 + 0.5 * math.log10(value) / span))
    if vmin == vmax:
        return 0.5
    t = (value - vmin) / (vmax - vmin)
    return min(1.0, max(0.0, t)) ** preset.gamma
