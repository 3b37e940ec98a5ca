import numpy as np
import pytest

from setxtab.binning import CellKey, ViewConfig, aggregate
from setxtab.datagen import (
    DriveRuleTable,
    OutputRule,
    SVariantSpec,
    default_drive_rules,
    draws,
    gen_drives,
    gen_s,
)
from setxtab.errors import InvalidConfigError, InvalidProbabilityError


class TestStreams:
    def test_counter_stream_deterministic(self):
        items = np.arange(1000, dtype=np.uint64)
        a = draws(42, items, 3)
        b = draws(42, items, 3)
        assert np.array_equal(a, b)

    def test_slots_independent(self):
        items = np.arange(1000, dtype=np.uint64)
        assert not np.array_equal(draws(42, items, 0), draws(42, items, 1))

    def test_prefix_property(self):
        long = gen_s(SVariantSpec("S4", 500, 9))
        short = gen_s(SVariantSpec("S4", 100, 9))
        assert np.array_equal(long.bits_a[:100], short.bits_a)
        assert np.array_equal(long.bits_b[:100], short.bits_b)


class TestSVariants:
    def test_s1_matching_rule(self):
        table = gen_s(SVariantSpec("S1", 2000, 11))
        assert np.array_equal(table.bits_a, table.bits_b)
        # spec'd example: {a1, a4} pairs with {b1, b4}
        idx = np.nonzero(table.bits_a == 0b1001)[0]
        assert len(idx) and all(int(table.bits_b[i]) == 0b1001 for i in idx)

    def test_s2_complement_rule(self):
        table = gen_s(SVariantSpec("S2", 2000, 11))
        assert np.array_equal(table.bits_b, table.bits_a ^ np.uint64(0xF))
        idx = np.nonzero(table.bits_a == 0b0001)[0]  # {a1} -> {b2,b3,b4}
        assert len(idx) and all(int(table.bits_b[i]) == 0b1110 for i in idx)

    def test_s2_collapsed_diagonal_zero(self):
        table = gen_s(SVariantSpec("S2", 3000, 5))
        config = ViewConfig(
            collapsed_a=frozenset(range(4)), collapsed_b=frozenset(range(4))
        )
        result = aggregate(table, config)
        for i in range(4):
            key = CellKey(i, i, None, None)
            assert result.cells[key] == 0
            assert key in result.empty_flags

    def test_s3_mixture(self):
        table = gen_s(SVariantSpec("S3", 4000, 13))
        match = np.array_equal
        same = (table.bits_a == table.bits_b)
        anti = (table.bits_b == (table.bits_a ^ np.uint64(0xF)))
        assert (same | anti).all()
        assert 0.4 < same.mean() < 0.6

    def test_s5_rule_share(self):
        table = gen_s(SVariantSpec("S5", 20000, 13))
        same = (table.bits_a == table.bits_b).mean()
        # 12.5% rule share plus 1/16 accidental matches ~= 0.18
        assert 0.15 < same < 0.22

    def test_uniform_univariate_histograms(self):
        n = 100_000
        for variant in ("S1", "S6"):
            table = gen_s(SVariantSpec(variant, n, 17))
            for bits in (table.bits_a, table.bits_b):
                hist = np.bincount(bits.astype(np.int64), minlength=16)
                sigma = (n * (1 / 16) * (15 / 16)) ** 0.5
                assert np.abs(hist - n / 16).max() < 4 * sigma

    def test_same_seed_identical(self):
        a = gen_s(SVariantSpec("S4", 1000, 3))
        b = gen_s(SVariantSpec("S4", 1000, 3))
        assert np.array_equal(a.bits_a, b.bits_a)
        assert np.array_equal(a.bits_b, b.bits_b)

    def test_bad_spec(self):
        with pytest.raises(InvalidConfigError):
            SVariantSpec("S9", 10, 1)
        with pytest.raises(InvalidConfigError):
            SVariantSpec("S1", 0, 1)


class TestDrives:
    def test_all_zero_probabilities_give_empty_outputs(self):
        rules = DriveRuleTable(
            ("i1", "i2"),
            ("o1", "o2"),
            (0.5, 0.5),
            (OutputRule(0.0, (0.0, 0.0)), OutputRule(0.0, (0.0, 0.0))),
        )
        table = gen_drives(500, 21, rules)
        assert (table.bits_b == 0).all()

    def test_all_one_probabilities_give_full_outputs(self):
        rules = DriveRuleTable(
            ("i1", "i2"),
            ("o1", "o2", "o3"),
            (0.5, 0.5),
            tuple(OutputRule(1.0, (0.0, 0.0)) for _ in range(3)),
        )
        table = gen_drives(500, 21, rules)
        assert (table.bits_b == 0b111).all()
        assert all(table.value_b(i).cardinality == 3 for i in range(5))

    def test_invalid_probability_rejected(self):
        with pytest.raises(InvalidProbabilityError):
            DriveRuleTable(
                ("i1",),
                ("o1",),
                (0.5,),
                (OutputRule(0.9, (0.3,)),),  # 1.2 on input {i1}
            )
        with pytest.raises(InvalidProbabilityError):
            DriveRuleTable(("i1",), ("o1",), (1.5,), (OutputRule(0.5, (0.0,)),))

    def test_default_rules_loud_dominates_element_centric(self):
        table = gen_drives(250_000, 1234)
        result = aggregate(table, ViewConfig(counting="element"))
        loud = table.universe_b.index("Loud")
        totals = {}
        for (element, _), mb in result.marginal_b.items():
            if element is not None:
                totals[element] = totals.get(element, 0) + mb.value
        top = max(totals, key=totals.get)
        assert top == loud
        assert all(totals[loud] > v for e, v in totals.items() if e != loud)

    def test_deterministic(self):
        a = gen_drives(2000, 77)
        b = gen_drives(2000, 77)
        assert np.array_equal(a.bits_a, b.bits_a) and np.array_equal(a.bits_b, b.bits_b)

    def test_input_subsets_roughly_uniform(self):
        table = gen_drives(64_000, 99)
        hist = np.bincount(table.bits_a.astype(np.int64), minlength=32)
        expect = 64_000 / 32
        sigma = (64_000 * (1 / 32) * (31 / 32)) ** 0.5
        assert np.abs(hist - expect).max() < 5 * sigma

    def test_loud_only_outputs_exist(self):
        table = gen_drives(20_000, 5)
        loud_bit = 1 << table.universe_b.index("Loud")
        only_loud = (table.bits_b == np.uint64(loud_bit)).sum()
        assert only_loud > 0
