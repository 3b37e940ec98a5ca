import numpy as np
import pytest

from setxtab.binning import ViewConfig
from setxtab.datagen import draws
from setxtab.model import ElementUniverse, SetPairTable, SetValue


def bits_of(universe: ElementUniverse, names) -> int:
    return SetValue.from_names(names, universe).bits


@pytest.fixture(scope="session")
def fig3_table() -> SetPairTable:
    """The three-trip walkthrough table used across golden tests."""
    ua = ElementUniverse("Input", ("Music", "Family", "Traffic"))
    ub = ElementUniverse("Output", ("Fun", "Resp", "Loud"))
    items = [
        (("Music", "Family"), ("Fun", "Resp")),
        (("Traffic",), ("Resp",)),
        (("Traffic",), ("Fun", "Resp")),
    ]
    return SetPairTable(
        ua,
        ub,
        [bits_of(ua, a) for a, _ in items],
        [bits_of(ub, b) for _, b in items],
    )


def _draw(seed: int, slot: int) -> int:
    return int(draws(seed, np.array([0], dtype=np.uint64), slot)[0])


def make_random_table(seed: int, max_n: int = 500, max_size: int = 6,
                      min_size: int = 1) -> SetPairTable:
    """Deterministic random table: uniform subsets over small universes."""
    n = 1 + _draw(seed, 0) % max_n
    span = max_size - min_size + 1
    size_a = min_size + _draw(seed, 1) % span
    size_b = min_size + _draw(seed, 2) % span
    items = np.arange(n, dtype=np.uint64)
    bits_a = draws(seed ^ 0xA5A5, items, 0) & np.uint64((1 << size_a) - 1)
    bits_b = draws(seed ^ 0xA5A5, items, 1) & np.uint64((1 << size_b) - 1)
    ua = ElementUniverse("A", tuple(f"a{i + 1}" for i in range(size_a)))
    ub = ElementUniverse("B", tuple(f"b{i + 1}" for i in range(size_b)))
    return SetPairTable(ua, ub, bits_a, bits_b)


def make_random_config(seed: int, table: SetPairTable, counting: str) -> ViewConfig:
    """Deterministic random collapse/cap/visibility combination."""
    size_a = len(table.universe_a)
    size_b = len(table.universe_b)
    mask_a = _draw(seed, 3) % (1 << size_a)
    mask_b = _draw(seed, 4) % (1 << size_b)
    cap_pick_a = _draw(seed, 5) % 4
    cap_pick_b = _draw(seed, 6) % 4
    flags = _draw(seed, 7)
    return ViewConfig(
        counting=counting,
        cap_a=None if cap_pick_a == 0 else cap_pick_a,
        cap_b=None if cap_pick_b == 0 else cap_pick_b,
        collapsed_a=frozenset(i for i in range(size_a) if (mask_a >> i) & 1),
        collapsed_b=frozenset(i for i in range(size_b) if (mask_b >> i) & 1),
        show_empty_a=bool(flags & 1),
        show_empty_b=bool(flags & 2),
    )
