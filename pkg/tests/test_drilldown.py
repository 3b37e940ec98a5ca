from fractions import Fraction

import pytest

from setxtab.binning import CellKey, ViewConfig, aggregate
from setxtab.drilldown import (
    DetailSelection,
    detail_views,
    enumerate_combinations,
)
from setxtab.errors import InvalidKeyError, InvalidSelectionError
from setxtab.model import ElementUniverse, SetPairTable

from conftest import make_random_table

F = Fraction


def complete_table(size_a, size_b):
    ua = ElementUniverse("A", tuple(f"a{i}" for i in range(size_a)))
    ub = ElementUniverse("B", tuple(f"b{i}" for i in range(size_b)))
    pairs = [(a, b) for a in range(1 << size_a) for b in range(1 << size_b)]
    return SetPairTable(ua, ub, [p[0] for p in pairs], [p[1] for p in pairs])


class TestDetailViews:
    def test_fig3_traffic_resp_cell(self, fig3_table):
        traffic, resp = 2, 1
        detail = detail_views(fig3_table, DetailSelection(traffic, resp))
        cell = detail.per_cell[(0, 1)]  # Traffic alone, Resp+1
        assert cell.item_count == 1
        assert cell.hist_a == (0, 0, 1)          # only Traffic
        assert cell.hist_b == (1, 1, 0)          # Fun and Resp
        assert cell.heat[traffic][0] == 1        # Traffic x Fun
        assert cell.heat[traffic][resp] == 1     # Traffic x Resp
        assert sum(sum(row) for row in cell.heat) == 2

    def test_zero_cell_all_zero(self, fig3_table):
        detail = detail_views(fig3_table, DetailSelection(0, 0))  # Music, Fun
        cell = detail.per_cell[(0, 0)]  # Music alone never occurs
        assert cell.item_count == 0
        assert set(cell.hist_a) == {0}
        assert set(cell.hist_b) == {0}
        assert all(v == 0 for row in cell.heat for v in row)

    def test_anchor_counts_equal_qualifying_items(self):
        table = make_random_table(17, max_n=40, min_size=2)
        e_a, e_b = 0, 0
        detail = detail_views(table, DetailSelection(e_a, e_b))
    # anchor element histogram equals the qualifying count in every cell
        for cell in detail.per_cell.values():
            assert cell.hist_a[e_a] == cell.item_count
            assert cell.hist_b[e_b] == cell.item_count
            assert cell.heat[e_a][e_b] == cell.item_count

    def test_detail_marginal_consistency(self):
        # Sum of each a-row of the co-membership matrix equals the summed
        # b-side cardinalities of qualifying items containing that element.
        table = make_random_table(31, max_n=60, min_size=2)
        detail = detail_views(table, DetailSelection(0, 0))
        for (k, l), cell in detail.per_cell.items():
            for a_prime in range(len(table.universe_a)):
                expected = 0
                for i in range(table.n):
                    sa = table.value_a(i)
                    sb = table.value_b(i)
                    if not (sa.contains(0) and sb.contains(0)):
                        continue
                    if sa.cardinality != k + 1 or sb.cardinality != l + 1:
                        continue
                    if sa.contains(a_prime):
                        expected += sb.cardinality
                assert sum(cell.heat[a_prime]) == expected

    def test_collapsed_selection_sums_constituents(self):
        table = make_random_table(53, max_n=80, min_size=3)
        full = detail_views(table, DetailSelection(0, 0))
        collapsed = detail_views(
            table,
            DetailSelection(0, 0, ViewConfig(collapsed_a=frozenset({0}), collapsed_b=frozenset({0}))),
        )
        merged = collapsed.per_cell[(None, None)]
        cells = list(full.per_cell.values())
        assert merged.item_count == sum(c.item_count for c in cells)
        for a in range(len(table.universe_a)):
            assert merged.hist_a[a] == sum(c.hist_a[a] for c in cells)
        for a in range(len(table.universe_a)):
            for b in range(len(table.universe_b)):
                assert merged.heat[a][b] == sum(c.heat[a][b] for c in cells)

    def test_invalid_selection(self, fig3_table):
        with pytest.raises(InvalidSelectionError):
            detail_views(fig3_table, DetailSelection(9, 0))


class TestCombinations:
    def test_fig3_half_cell(self, fig3_table):
        combos = enumerate_combinations(
            fig3_table, ViewConfig(), CellKey(2, 1, 0, 1)  # Traffic, Resp, 0, +1
        )
        assert combos.total_value == F(1, 2)
        assert len(combos.entries) == 1
        entry = combos.entries[0]
        assert entry.set_a.names(fig3_table.universe_a) == ["Traffic"]
        assert entry.set_b.names(fig3_table.universe_b) == ["Fun", "Resp"]
        assert entry.item_count == 1
        assert combos.rule_label == "Resp+1 vs Traffic"

    def test_fig3_unit_cell(self, fig3_table):
        combos = enumerate_combinations(fig3_table, ViewConfig(), CellKey(2, 1, 0, 0))
        assert combos.total_value == 1
        assert [e.item_count for e in combos.entries] == [1]
        assert combos.entries[0].set_b.names(fig3_table.universe_b) == ["Resp"]

    def test_collapsed_cell_complete_enumeration(self):
        # 2x2 complete enumeration: 2^(s-1) = 2 subsets contain a given
        # element per side, so the fully collapsed (a, b) cell groups
        # 2*2 = 4 combinations, one item each.
        table = complete_table(2, 2)
        config = ViewConfig(
            collapsed_a=frozenset(range(2)), collapsed_b=frozenset(range(2))
        )
        combos = enumerate_combinations(table, config, CellKey(0, 0, None, None))
        assert len(combos.entries) == 4
        assert all(e.item_count == 1 for e in combos.entries)
        result = aggregate(table, config)
        assert combos.total_value == result.cells[CellKey(0, 0, None, None)]

    def test_totals_match_aggregate_everywhere(self, fig3_table):
        for config in (ViewConfig(), ViewConfig(counting="element"), ViewConfig(cap_b=1)):
            result = aggregate(fig3_table, config)
            for key in result.grid_keys():
                combos = enumerate_combinations(fig3_table, config, key)
                assert combos.total_value == result.cells[key], key
                reconstructed = sum(
                    (e.item_count * e.weight for e in combos.entries), F(0)
                )
                assert reconstructed == result.cells[key]

    def test_sorted_by_count_then_bits(self):
        table = make_random_table(61, max_n=200, min_size=3)
        config = ViewConfig(collapsed_a=frozenset({0}), collapsed_b=frozenset({0}))
        combos = enumerate_combinations(table, config, CellKey(0, 0, None, None))
        counts = [e.item_count for e in combos.entries]
        assert counts == sorted(counts, reverse=True)
        for prev, curr in zip(combos.entries, combos.entries[1:]):
            if prev.item_count == curr.item_count:
                assert (prev.set_a.bits, prev.set_b.bits) < (curr.set_a.bits, curr.set_b.bits)

    def test_capped_rule_label(self):
        table = make_random_table(71, max_n=50, min_size=5)
        config = ViewConfig(cap_a=2)
        combos = enumerate_combinations(table, config, CellKey(0, 0, 2, 0))
        assert "+2…" in combos.rule_label

    def test_empty_set_cell(self):
        ua = ElementUniverse("A", ("x",))
        ub = ElementUniverse("B", ("y",))
        table = SetPairTable(ua, ub, [0, 0, 1], [1, 1, 1])
        combos = enumerate_combinations(table, ViewConfig(), CellKey(None, 0, None, 0))
        assert combos.total_value == 2
        assert combos.entries[0].item_count == 2
        assert combos.rule_label == "y vs ∅"

    def test_invalid_cell(self, fig3_table):
        with pytest.raises(InvalidKeyError):
            enumerate_combinations(fig3_table, ViewConfig(), CellKey(0, 0, 7, 0))
        with pytest.raises(InvalidKeyError):
            enumerate_combinations(fig3_table, ViewConfig(), CellKey(None, 0, 0, 0))
