"""Unoptimized reference aggregation, used only to cross-check the engine.

Everything here is recomputed from first principles with a plain double
loop (items x element pairs) and per-item Fraction arithmetic; it shares
the result data types with the engine but none of its scan, merge, or
binning code.  Keep it slow and obvious.
"""

from __future__ import annotations

from fractions import Fraction

from .binning import AggregateResult, CellKey, ELEMENT_CENTRIC, MarginalBin, ViewConfig
from .model import SetPairTable


def _bin_cards(size: int, cap: int | None, collapsed: bool) -> list[tuple[int | None, list[int]]]:
    """(bin index, folded cardinalities) pairs for one element axis."""
    if collapsed:
        return [(None, list(range(1, size + 1)))]
    out: list[tuple[int | None, list[int]]] = []
    last = size - 1 if cap is None or cap >= size - 1 else cap
    for k in range(last + 1):
        if k == last:
            out.append((k, list(range(k + 1, size + 1))))
        else:
            out.append((k, [k + 1]))
    return out


def _bin_index(card: int, size: int, cap: int | None, collapsed: bool) -> int | None:
    if collapsed:
        return None
    k = card - 1
    if cap is not None and cap < size - 1 and k > cap:
        return cap
    return k


def brute_force_oracle(table: SetPairTable, config: ViewConfig) -> AggregateResult:
    """Same contract as :func:`setxtab.binning.aggregate`, the slow way."""
    element_centric = config.counting == ELEMENT_CENTRIC
    size_a = len(table.universe_a)
    size_b = len(table.universe_b)

    cells: dict[CellKey, Fraction] = {}
    for col in [None, *range(size_a)]:
        col_bins = (
            [(None, [0])]
            if col is None
            else _bin_cards(size_a, config.cap_a, col in config.collapsed_a)
        )
        for row in [None, *range(size_b)]:
            row_bins = (
                [(None, [0])]
                if row is None
                else _bin_cards(size_b, config.cap_b, row in config.collapsed_b)
            )
            for kb, _ in col_bins:
                for lb, _ in row_bins:
                    cells[CellKey(col, row, kb, lb)] = Fraction(0)

    marg_a: dict[tuple[int | None, int | None], list] = {}
    marg_b: dict[tuple[int | None, int | None], list] = {}
    for dim_size, cap, collapsed, out in (
        (size_a, config.cap_a, config.collapsed_a, marg_a),
        (size_b, config.cap_b, config.collapsed_b, marg_b),
    ):
        out[(None, None)] = [Fraction(0), 0, False, None]
        for e in range(dim_size):
            for idx, cards in _bin_cards(dim_size, cap, e in collapsed):
                out[(e, idx)] = [Fraction(0), 0, len(cards) == 1 and not element_centric, cards[0] if len(cards) == 1 else None]

    for item in range(table.n):
        sa = table.value_a(item)
        sb = table.value_b(item)
        m = sa.cardinality
        n = sb.cardinality
        weight = Fraction(1) if element_centric else Fraction(1, max(m, 1) * max(n, 1))
        cols = sa.indices() or [None]
        rows = sb.indices() or [None]
        for a in cols:
            for b in rows:
                key = CellKey(
                    a,
                    b,
                    None if a is None else _bin_index(m, size_a, config.cap_a, a in config.collapsed_a),
                    None if b is None else _bin_index(n, size_b, config.cap_b, b in config.collapsed_b),
                )
                cells[key] += weight
        for a in cols:
            mkey = (a, None if a is None else _bin_index(m, size_a, config.cap_a, a in config.collapsed_a))
            bucket = marg_a[mkey]
            bucket[1] += 1
            if element_centric:
                bucket[0] += Fraction(1) if a is not None else Fraction(0)
            else:
                bucket[0] += Fraction(1, max(m, 1))
        for b in rows:
            mkey = (b, None if b is None else _bin_index(n, size_b, config.cap_b, b in config.collapsed_b))
            bucket = marg_b[mkey]
            bucket[1] += 1
            if element_centric:
                bucket[0] += Fraction(1) if b is not None else Fraction(0)
            else:
                bucket[0] += Fraction(1, max(n, 1))

    def finish(raw: dict) -> dict:
        return {
            key: MarginalBin(value, count, fraction, den)
            for key, (value, count, fraction, den) in raw.items()
        }

    total = sum(cells.values(), Fraction(0))
    return AggregateResult(
        universe_a=table.universe_a,
        universe_b=table.universe_b,
        config=config,
        n=table.n,
        cells=cells,
        marginal_a=finish(marg_a),
        marginal_b=finish(marg_b),
        total=total,
        empty_flags=frozenset(k for k, v in cells.items() if v == 0),
    )
