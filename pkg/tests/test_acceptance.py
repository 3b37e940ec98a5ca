"""Acceptance suite: one test per criterion, printing one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import contextlib
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from fastapi.testclient import TestClient

from setxtab.binning import (
    AggregateResult,
    CellKey,
    ViewConfig,
    aggregate,
    axis_layout,
)
from setxtab.brushing import And, HeatmapMember, ItemIdIn, Not, Or, brushed_aggregate
from setxtab.datagen import SVariantSpec, gen_drives, gen_s
from setxtab.drilldown import DetailSelection, detail_views, enumerate_combinations
from setxtab.model import ElementUniverse, SetPairTable, negate_element
from setxtab.oracle import _bin_index, brute_force_oracle
from setxtab.service import create_app
from setxtab.transforms import deviation_transform, expected_cell_value, rank_transform

from conftest import bits_of, make_random_config, make_random_table
from test_brushing import random_brush

F = Fraction
S_SEED = 20260810


@contextlib.contextmanager
def criterion(name: str):
    info = {}
    try:
        yield info
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    extra = info.get("extra", "")
    print(f"ACCEPTANCE {name}: PASS{' (' + extra + ')' if extra else ''}")


# ---------------------------------------------------------------------------
# campaign shared by the conservation and oracle criteria

@pytest.fixture(scope="module")
def campaign():
    runs = []
    for t in range(1000):
        seed = 10_000 + t
        table = make_random_table(seed)
        configs = {
            "full-item": ViewConfig(),
            "full-element": ViewConfig(counting="element"),
            "random-item": make_random_config(seed, table, "item"),
            "random-element": make_random_config(seed, table, "element"),
            "all-collapsed-item": ViewConfig(
                collapsed_a=frozenset(range(len(table.universe_a))),
                collapsed_b=frozenset(range(len(table.universe_b))),
                show_empty_a=False,
                show_empty_b=False,
            ),
            "all-collapsed-element": ViewConfig(
                counting="element",
                collapsed_a=frozenset(range(len(table.universe_a))),
                collapsed_b=frozenset(range(len(table.universe_b))),
            ),
        }
        results = {name: aggregate(table, cfg) for name, cfg in configs.items()}
        runs.append((seed, table, configs, results))
    return runs


def test_fig3_golden_regression(fig3_table):
    with criterion("fig3-golden") as info:
        start = time.perf_counter()
        r = aggregate(fig3_table, ViewConfig())
        music, family, traffic = 0, 1, 2
        fun, resp = 0, 1
        assert r.cells[CellKey(music, fun, 1, 1)] == F(1, 4)
        assert r.cells[CellKey(music, resp, 1, 1)] == F(1, 4)
        assert r.cells[CellKey(family, fun, 1, 1)] == F(1, 4)
        assert r.cells[CellKey(family, resp, 1, 1)] == F(1, 4)
        assert r.cells[CellKey(traffic, resp, 0, 0)] == F(1)
        assert r.cells[CellKey(traffic, resp, 0, 1)] == F(1, 2)
        assert r.cells[CellKey(traffic, fun, 0, 1)] == F(1, 2)
        mb = r.marginal_b[(resp, 1)]
        assert mb.value == F(1) and mb.item_count == 2
        assert mb.display_as_fraction and mb.denominator == 2  # rendered "2/2"
        from setxtab.io import marginal_label

        assert marginal_label(mb) == "2/2"
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0
        info["extra"] = f"{elapsed * 1000:.0f} ms"


def test_conservation_suite(campaign):
    with criterion("conservation-suite") as info:
        for seed, table, configs, results in campaign:
            expect_a = sum(table.value_a(i).cardinality for i in range(table.n))
            expect_b = sum(table.value_b(i).cardinality for i in range(table.n))
            for name, result in results.items():
                marg_a = sum(mb.value for mb in result.marginal_a.values())
                marg_b = sum(mb.value for mb in result.marginal_b.values())
                if result.config.counting == "item":
                    assert result.total == table.n, (seed, name)
                    assert marg_a == table.n and marg_b == table.n, (seed, name)
                else:
                    assert marg_a == expect_a and marg_b == expect_b, (seed, name)
        info["extra"] = "1000 tables x 6 configs"


def _reconstruct_detail(table, selection):
    """Oracle-side detail views from a per-item enumeration."""
    cfg = selection.config
    size_a, size_b = len(table.universe_a), len(table.universe_b)
    cells = {}
    for i in range(table.n):
        sa, sb = table.value_a(i), table.value_b(i)
        if not (sa.contains(selection.e_a) and sb.contains(selection.e_b)):
            continue
        k = _bin_index(sa.cardinality, size_a, cfg.cap_a, selection.e_a in cfg.collapsed_a)
        l = _bin_index(sb.cardinality, size_b, cfg.cap_b, selection.e_b in cfg.collapsed_b)
        hist_a, hist_b, heat, count = cells.setdefault(
            (k, l),
            ([0] * size_a, [0] * size_b, [[0] * size_b for _ in range(size_a)], [0]),
        )
        count[0] += 1
        for a in sa.indices():
            hist_a[a] += 1
            for b in sb.indices():
                heat[a][b] += 1
        for b in sb.indices():
            hist_b[b] += 1
    return cells


def _reconstruct_combinations(table, config, cell):
    """Oracle-side combination list from a per-item enumeration."""
    size_a, size_b = len(table.universe_a), len(table.universe_b)
    groups = {}
    total = F(0)
    for i in range(table.n):
        sa, sb = table.value_a(i), table.value_b(i)
        if cell.col is None:
            if sa.bits != 0:
                continue
        else:
            if not sa.contains(cell.col):
                continue
            if _bin_index(sa.cardinality, size_a, config.cap_a, cell.col in config.collapsed_a) != cell.k:
                continue
        if cell.row is None:
            if sb.bits != 0:
                continue
        else:
            if not sb.contains(cell.row):
                continue
            if _bin_index(sb.cardinality, size_b, config.cap_b, cell.row in config.collapsed_b) != cell.l:
                continue
        groups[(sa.bits, sb.bits)] = groups.get((sa.bits, sb.bits), 0) + 1
        if config.counting == "element":
            total += 1
        else:
            total += F(1, max(sa.cardinality, 1) * max(sb.cardinality, 1))
    return groups, total


def test_oracle_equivalence(campaign):
    with criterion("oracle-equivalence") as info:
        for seed, table, configs, results in campaign:
            for name in ("random-item", "random-element"):
                engine = results[name]
                oracle = brute_force_oracle(table, configs[name])
                assert dict(engine.cells) == dict(oracle.cells), (seed, name)
                assert dict(engine.marginal_a) == dict(oracle.marginal_a), (seed, name)
                assert dict(engine.marginal_b) == dict(oracle.marginal_b), (seed, name)
                assert engine.total == oracle.total

            # detail views against an independent per-item reconstruction
            config = configs["random-item"]
            e_a = seed % len(table.universe_a)
            e_b = (seed // 7) % len(table.universe_b)
            selection = DetailSelection(e_a, e_b, config)
            detail = detail_views(table, selection)
            expected = _reconstruct_detail(table, selection)
            for key, cell in detail.per_cell.items():
                hist_a, hist_b, heat, count = expected.get(
                    key,
                    ([0] * len(table.universe_a), [0] * len(table.universe_b),
                     [[0] * len(table.universe_b) for _ in range(len(table.universe_a))], [0]),
                )
                assert list(cell.hist_a) == hist_a, (seed, key)
                assert list(cell.hist_b) == hist_b, (seed, key)
                assert [list(r) for r in cell.heat] == heat, (seed, key)
                assert cell.item_count == count[0], (seed, key)

            # combination lists against the same reconstruction
            engine = results["random-item"]
            keys = [k for k in engine.grid_keys()]
            for key in (keys[seed % len(keys)], keys[(seed * 13) % len(keys)]):
                combos = enumerate_combinations(table, config, key)
                groups, total = _reconstruct_combinations(table, config, key)
                assert combos.total_value == total == engine.cells[key], (seed, key)
                assert {(e.set_a.bits, e.set_b.bits): e.item_count for e in combos.entries} == groups
        info["extra"] = "2000 oracle configs + drill-down reconstruction"


def _diag_tuple(table):
    """(same-cardinality concentration, same-cardinality deviation ratio)
    over the diagonal heatmaps, compared lexicographically."""
    result = aggregate(table, ViewConfig())
    size = len(table.universe_a)
    total = F(0)
    same = F(0)
    for key, value in result.cells.items():
        if key.col is None or key.row is None or key.col != key.row:
            continue
        total += value
        if key.k == key.l:
            same += value
    expected_same = sum(
        expected_cell_value(size, size, table.n, CellKey(i, i, k, k))
        for i in range(size)
        for k in range(size)
    )
    concentration = same / total if total else F(0)
    ratio = float(same / expected_same)
    return (concentration, ratio)


def test_s_family_discrimination():
    with criterion("s-family-discrimination") as info:
        start = time.perf_counter()
        n = 100_000
        tables = {v: gen_s(SVariantSpec(v, n, S_SEED)) for v in
                  ("S1", "S2", "S3", "S4", "S5", "S6")}

        # (a) univariate subset histograms uniform within 4 sigma, all variants
        sigma = math.sqrt(n * (1 / 16) * (15 / 16))
        for variant, table in tables.items():
            for bits in (table.bits_a, table.bits_b):
                hist = np.bincount(bits.astype(np.int64), minlength=16)
                assert np.abs(hist - n / 16).max() < 4 * sigma, variant

        collapsed = ViewConfig(
            collapsed_a=frozenset(range(4)), collapsed_b=frozenset(range(4))
        )
        collapsed_ec = ViewConfig(
            counting="element",
            collapsed_a=frozenset(range(4)),
            collapsed_b=frozenset(range(4)),
            show_empty_a=False,
            show_empty_b=False,
        )

        # (b) S2 fully-collapsed diagonal exactly zero and flagged empty
        r2 = aggregate(tables["S2"], collapsed)
        for i in range(4):
            key = CellKey(i, i, None, None)
            assert r2.cells[key] == 0 and key in r2.empty_flags

        # (c) S1 element-centric diagonal/off-diagonal ratio ~ 2:1
        r1 = aggregate(tables["S1"], collapsed_ec)
        diag = [float(r1.cells[CellKey(i, i, None, None)]) for i in range(4)]
        off = [
            float(r1.cells[CellKey(i, j, None, None)])
            for i in range(4)
            for j in range(4)
            if i != j
        ]
        ratio = (sum(diag) / len(diag)) / (sum(off) / len(off))
        assert 1.9 <= ratio <= 2.1

        # (d) S6 deviation ratios of the collapsed element-pair cells near 1
        r6 = aggregate(tables["S6"], collapsed_ec)
        dev = deviation_transform(r6)
        element_ratios = [
            dev.ratios[key]
            for key in r6.grid_keys()
            if key.col is not None and key.row is not None
        ]
        assert len(element_ratios) == 16
        assert all(0.95 <= r <= 1.05 for r in element_ratios)

        # (e) diagonal-excess tuples strictly separate the variants
        tuples = {v: _diag_tuple(t) for v, t in tables.items()}
        assert tuples["S1"] > tuples["S3"] > tuples["S4"] > tuples["S5"] > tuples["S6"] >= tuples["S2"]

        elapsed = time.perf_counter() - start
        assert elapsed < 30.0
        info["extra"] = f"{elapsed:.1f} s"


def _expected_enumeration(size_a, size_b, n, counting, config):
    """Batch enumeration oracle: average contribution over all subset pairs."""
    from setxtab.binning import cell_contributions
    from setxtab.model import SetValue

    totals = {}
    for bits_a in range(1 << size_a):
        for bits_b in range(1 << size_b):
            sa, sb = SetValue(bits_a, size_a), SetValue(bits_b, size_b)
            for raw, weight in cell_contributions(sa, sb, counting):
                key = CellKey(
                    raw.col,
                    raw.row,
                    None if raw.col is None else _bin_index(
                        sa.cardinality, size_a, config.cap_a, raw.col in config.collapsed_a),
                    None if raw.row is None else _bin_index(
                        sb.cardinality, size_b, config.cap_b, raw.row in config.collapsed_b),
                )
                totals[key] = totals.get(key, F(0)) + weight
    scale = F(n, 1 << (size_a + size_b))
    return {k: v * scale for k, v in totals.items()}


def test_deviation_null():
    with criterion("deviation-null") as info:
        size = 4
        ua = ElementUniverse("A", tuple(f"a{i}" for i in range(size)))
        ub = ElementUniverse("B", tuple(f"b{i}" for i in range(size)))
        pairs = [(a, b) for a in range(16) for b in range(16)]
        table = SetPairTable(ua, ub, [p[0] for p in pairs], [p[1] for p in pairs])
        assert table.n == 256

        result = aggregate(table, ViewConfig())
        dev = deviation_transform(result)
        assert all(abs(r - 1.0) <= 1e-12 for r in dev.ratios.values())

        # closed form matches the enumeration oracle on every key, in both
        # counting modes and under a merged configuration
        for counting in ("item", "element"):
            for config in (
                ViewConfig(counting=counting),
                ViewConfig(counting=counting, cap_a=2, collapsed_b=frozenset({1})),
            ):
                brute = _expected_enumeration(size, size, 256, counting, config)
                reference = aggregate(table, config)
                for key in reference.grid_keys():
                    closed = expected_cell_value(size, size, 256, key, counting, config)
                    assert abs(closed - brute.get(key, F(0))) <= F(1, 10**12), key
        info["extra"] = "256-item complete enumeration"


def _value_grid(values):
    """Dense aggregate whose only non-zero cells are (i, 0, 0, 0) = values[i]."""
    ua = ElementUniverse("A", tuple(f"c{i}" for i in range(len(values))))
    ub = ElementUniverse("B", ("r",))
    config = ViewConfig()
    cells = {}
    for col, col_bins in axis_layout(ua, None, frozenset()):
        for row, row_bins in axis_layout(ub, None, frozenset()):
            for cb in col_bins:
                for rb in row_bins:
                    cells[CellKey(
                        col,
                        row,
                        cb.index if col is not None else None,
                        rb.index if row is not None else None,
                    )] = F(0)
    total = F(0)
    for i, v in enumerate(values):
        cells[CellKey(i, 0, 0, 0)] = F(v)
        total += F(v)
    return AggregateResult(
        universe_a=ua,
        universe_b=ub,
        config=config,
        n=int(total) if total.denominator == 1 else 0,
        cells=cells,
        marginal_a={},
        marginal_b={},
        total=total,
        empty_flags=frozenset(k for k, v in cells.items() if v == 0),
    )


def test_rank_contract():
    with criterion("rank-contract") as info:
        from setxtab.datagen import draws

        base_grid = _value_grid([5, 3, 3, 1])
        std = rank_transform(base_grid, "standard")
        dense = rank_transform(base_grid, "dense")

        def ordered_ranks(rank_map):
            keys = sorted(rank_map.ranks, key=lambda k: base_grid.cells[k], reverse=True)
            return [rank_map.ranks[k] for k in keys]

        assert ordered_ranks(std) == [1, 2, 2, 4]
        assert ordered_ranks(dense) == [1, 2, 2, 3]

        checked = 0
        grid_index = 0
        while checked < 200:
            seed = 777 + grid_index
            items = np.arange(25, dtype=np.uint64)
            raw = [int(x) for x in draws(seed, items, 0)]
            values = [F(1 + (x % 12)) for x in raw]
            reference = {
                mode: rank_transform(_value_grid(values), mode)
                for mode in ("standard", "dense")
            }
            for j in range(20):
                a = 1 + int(draws(seed, items, 1)[j]) % 5
                b = int(draws(seed, items, 2)[j]) % 7
                c = int(draws(seed, items, 3)[j]) % 11
                if j % 2:
                    transformed = [a * v + b for v in values]          # affine
                else:
                    transformed = [a * v**3 + (b + 1) * v + c for v in values]  # cubic
                grid = _value_grid(transformed)
                for mode in ("standard", "dense"):
                    mapped = rank_transform(grid, mode)
                    assert dict(mapped.ranks) == dict(reference[mode].ranks)
                    assert mapped.max_rank == reference[mode].max_rank
                checked += 1
            grid_index += 1
        info["extra"] = f"{checked} monotone transforms"


def test_negation_involution():
    with criterion("negation-involution") as info:
        table = gen_drives(50_000, 314159)
        loud = table.universe_b.index("Loud")
        loud_bit = np.uint64(1 << loud)

        only_loud = table.bits_b == loud_bit
        loud_free = (table.bits_b & loud_bit) == 0
        assert only_loud.sum() > 0 and loud_free.sum() > 0

        negated = negate_element(table, "b", loud)
        assert (negated.bits_b[only_loud] == 0).all()
        assert np.array_equal(
            negated.bits_b[loud_free], table.bits_b[loud_free] | loud_bit
        )
        assert negated.universe_b.label(loud) == "¬Loud"

        restored = negate_element(negated, "b", loud)
        assert np.array_equal(restored.bits_b, table.bits_b)
        assert np.array_equal(restored.bits_a, table.bits_a)
        assert restored.universe_b == table.universe_b
        info["extra"] = f"{int(only_loud.sum())} loud-only items converted"


def test_brushing_algebra():
    with criterion("brushing-algebra") as info:
        config = ViewConfig()
        pair_count = 0
        for t in range(50):
            table = make_random_table(30_000 + t, max_n=120)
            for j in range(2):
                p = random_brush(table, t * 101 + j * 11 + 1)
                q = random_brush(table, t * 101 + j * 11 + 5)
                op = brushed_aggregate(table, config, p)
                oq = brushed_aggregate(table, config, q)
                union = brushed_aggregate(table, config, Or((p, q))).brushed
                inter = brushed_aggregate(table, config, And((p, q))).brushed
                neg = brushed_aggregate(table, config, Not(And((p, q)))).brushed
                alt = brushed_aggregate(table, config, Or((Not(p), Not(q)))).brushed
                for key, base_value in op.base.cells.items():
                    assert 0 <= op.brushed.cells[key] <= base_value
                    assert 0 <= oq.brushed.cells[key] <= base_value
                    assert (
                        union.cells[key] + inter.cells[key]
                        == op.brushed.cells[key] + oq.brushed.cells[key]
                    )
                    assert neg.cells[key] == alt.cells[key]
                for key, mb in op.base.marginal_a.items():
                    assert op.brushed.marginal_a[key].value <= mb.value
                pair_count += 2

        drives = gen_drives(20_000, 99)
        family = drives.universe_a.index("Family")
        cheap = drives.universe_b.index("Cheap")
        mask = HeatmapMember(family, cheap).mask(drives)
        manual = (
            ((drives.bits_a >> np.uint64(family)) & np.uint64(1)).astype(bool)
            & ((drives.bits_b >> np.uint64(cheap)) & np.uint64(1)).astype(bool)
        )
        assert np.array_equal(mask, manual)
        info["extra"] = f"{pair_count * 2} brushes"


def test_tooltip_reconstruction():
    with criterion("tooltip-reconstruction") as info:
        cells_checked = 0
        for t in range(50):
            table = make_random_table(40_000 + t, max_n=120, max_size=4)
            config = make_random_config(40_000 + t, table, "item")
            result = aggregate(table, config)
            for key in result.grid_keys():
                combos = enumerate_combinations(table, config, key)
                reconstructed = sum(
                    (e.item_count * e.weight for e in combos.entries), F(0)
                )
                assert reconstructed == result.cells[key], (t, key)
                counts = [e.item_count for e in combos.entries]
                assert counts == sorted(counts, reverse=True), (t, key)
                cells_checked += 1
        info["extra"] = f"{cells_checked} cells"


def test_scale():
    with criterion("scale") as info:
        table = gen_drives(250_000, 4242)
        start = time.perf_counter()
        result = aggregate(table, ViewConfig(transform="deviation"))
        dev = deviation_transform(result)
        engine_elapsed = time.perf_counter() - start
        assert engine_elapsed < 2.0
        assert result.total == 250_000
        assert dev.log_span >= 0.1

        client = TestClient(create_app())
        created = client.post(
            "/generate", json={"variant": "drives", "n": 250_000, "seed": 4242}
        )
        assert created.status_code == 201
        ds = created.json()["id"]
        start = time.perf_counter()
        response = client.post(
            f"/datasets/{ds}/aggregate",
            json={"config": {"transform": "deviation"}},
        )
        service_elapsed = time.perf_counter() - start
        assert response.status_code == 200
        assert service_elapsed < 3.0
        info["extra"] = f"engine {engine_elapsed:.2f} s, service {service_elapsed:.2f} s"
