"""Core data model: element universes, set values, and paired-set tables.

A set-valued cell is stored as a bit vector packed into a single 64-bit
word (bit ``i`` set means element ``i`` of the universe is present), so
membership tests and cardinalities are O(1) on the aggregation hot path.
Universes are therefore capped at 64 elements per dimension.

Tables are immutable after construction; all transforms return new tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    InvalidPermutationError,
    UnknownElementError,
    UniverseMismatchError,
    UniverseOverflowError,
)

MAX_UNIVERSE = 64

DIM_A = "a"
DIM_B = "b"


def popcount64(arr: np.ndarray) -> np.ndarray:
    """Per-element popcount of a uint64 array."""
    return np.bitwise_count(arr).astype(np.int64)


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the indices of the set bits, lowest first."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


@dataclass(frozen=True)
class ElementUniverse:
    """Ordered alphabet of possible set elements for one dimension.

    ``display_order`` is a presentation permutation only; it never affects
    aggregate values.  ``negated`` flags mark elements whose membership has
    been toggled table-wide; their labels render with a NOT sign prefix.
    """

    name: str
    elements: tuple[str, ...]
    display_order: tuple[int, ...] = ()
    negated: tuple[bool, ...] = ()

    def __post_init__(self):
        if len(self.elements) > MAX_UNIVERSE:
            raise UniverseOverflowError(
                f"universe {self.name!r} has {len(self.elements)} elements (max {MAX_UNIVERSE})"
            )
        seen = set()
        for e in self.elements:
            if not e:
                raise ValueError(f"universe {self.name!r} has an empty element name")
            if e in seen:
                raise UnknownElementError(f"duplicate element {e!r} in universe {self.name!r}")
            seen.add(e)
        n = len(self.elements)
        if not self.display_order:
            object.__setattr__(self, "display_order", tuple(range(n)))
        elif sorted(self.display_order) != list(range(n)):
            raise InvalidPermutationError(
                f"display_order {self.display_order} is not a permutation of 0..{n - 1}"
            )
        if not self.negated:
            object.__setattr__(self, "negated", (False,) * n)
        elif len(self.negated) != n:
            raise ValueError("negated flags must match element count")

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise UnknownElementError(f"{name!r} is not in universe {self.name!r}") from None

    def label(self, index: int) -> str:
        base = self.elements[index]
        return f"¬{base}" if self.negated[index] else base

    def labels_in_display_order(self) -> list[str]:
        return [self.label(i) for i in self.display_order]

    def with_display_order(self, permutation: Sequence[int]) -> "ElementUniverse":
        return ElementUniverse(self.name, self.elements, tuple(permutation), self.negated)

    def with_negation_toggled(self, index: int) -> "ElementUniverse":
        flags = list(self.negated)
        flags[index] = not flags[index]
        return ElementUniverse(self.name, self.elements, self.display_order, tuple(flags))


@dataclass(frozen=True)
class SetValue:
    """One set-typed cell: a subset of a universe, as a bit vector.

    The empty set (``bits == 0``) is a legal value.
    """

    bits: int
    size: int

    def __post_init__(self):
        if self.bits >> self.size:
            raise ValueError(f"bits 0x{self.bits:x} exceed universe size {self.size}")

    @property
    def cardinality(self) -> int:
        return self.bits.bit_count()

    def contains(self, index: int) -> bool:
        return bool((self.bits >> index) & 1)

    def indices(self) -> list[int]:
        return list(iter_bits(self.bits))

    def names(self, universe: ElementUniverse) -> list[str]:
        return [universe.elements[i] for i in iter_bits(self.bits)]

    @classmethod
    def from_names(cls, names: Iterable[str], universe: ElementUniverse) -> "SetValue":
        bits = 0
        for name in names:
            bits |= 1 << universe.index(name)
        return cls(bits, len(universe))


def parse_set_value(
    text: str,
    delimiter: str,
    universe: ElementUniverse,
    policy: str = "strict",
) -> tuple[SetValue, ElementUniverse]:
    """Parse a delimiter-separated element list into a SetValue.

    The empty string means the empty set; duplicate names collapse to one
    bit.  ``policy`` is ``"strict"`` (unknown names raise) or ``"register"``
    (unknown names are appended to the universe, which is returned possibly
    grown).
    """
    if policy not in ("strict", "register"):
        raise ValueError(f"unknown policy {policy!r}")
    bits = 0
    if text:
        for raw in text.split(delimiter):
            name = raw.strip()
            if not name:
                continue
            if name not in universe.elements:
                if policy == "strict":
                    raise UnknownElementError(
                        f"{name!r} is not in universe {universe.name!r}"
                    )
                if len(universe.elements) >= MAX_UNIVERSE:
                    raise UniverseOverflowError(
                        f"universe {universe.name!r} cannot grow past {MAX_UNIVERSE} elements"
                    )
                universe = ElementUniverse(
                    universe.name,
                    universe.elements + (name,),
                    universe.display_order + (len(universe.elements),),
                    universe.negated + (False,),
                )
            bits |= 1 << universe.index(name)
    return SetValue(bits, len(universe)), universe


class SetPairTable:
    """N items, each with two set values (dimensions ``a`` and ``b``).

    ``extras`` holds opaque per-item attribute columns, stored but never
    interpreted; they exist so brushed item ids can be joined back to
    external views.  Item ids are the stable positions ``0..N-1``.
    """

    __slots__ = ("universe_a", "universe_b", "bits_a", "bits_b", "extras", "_pair_hist")

    def __init__(
        self,
        universe_a: ElementUniverse,
        universe_b: ElementUniverse,
        bits_a: np.ndarray | Sequence[int],
        bits_b: np.ndarray | Sequence[int],
        extras: Mapping[str, Sequence[str]] | None = None,
    ):
        a = np.ascontiguousarray(bits_a, dtype=np.uint64)
        b = np.ascontiguousarray(bits_b, dtype=np.uint64)
        if a.shape != b.shape or a.ndim != 1:
            raise UniverseMismatchError("bits_a and bits_b must be equal-length 1-d arrays")
        if len(a) and len(universe_a) < 64 and int(a.max()) >> len(universe_a):
            raise UniverseMismatchError("a-values exceed universe size")
        if len(b) and len(universe_b) < 64 and int(b.max()) >> len(universe_b):
            raise UniverseMismatchError("b-values exceed universe size")
        a.setflags(write=False)
        b.setflags(write=False)
        self.universe_a = universe_a
        self.universe_b = universe_b
        self.bits_a = a
        self.bits_b = b
        self.extras = {k: tuple(v) for k, v in (extras or {}).items()}
        for col, values in self.extras.items():
            if len(values) != len(a):
                raise ValueError(f"extra column {col!r} has wrong length")
        self._pair_hist = None

    def __len__(self) -> int:
        return len(self.bits_a)

    @property
    def n(self) -> int:
        return len(self.bits_a)

    @property
    def item_ids(self) -> range:
        return range(len(self.bits_a))

    def universe(self, dim: str) -> ElementUniverse:
        return self.universe_a if dim == DIM_A else self.universe_b

    def bits(self, dim: str) -> np.ndarray:
        return self.bits_a if dim == DIM_A else self.bits_b

    def value_a(self, item: int) -> SetValue:
        return SetValue(int(self.bits_a[item]), len(self.universe_a))

    def value_b(self, item: int) -> SetValue:
        return SetValue(int(self.bits_b[item]), len(self.universe_b))

    def pair_histogram(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct (bits_a, bits_b) pairs and their item counts.

        Cached: the table is immutable, and every aggregation pass starts
        from this histogram instead of rescanning items.
        """
        if self._pair_hist is None:
            if len(self) == 0:
                pairs = np.empty((0, 2), dtype=np.uint64)
                counts = np.empty(0, dtype=np.int64)
            else:
                stacked = np.stack([self.bits_a, self.bits_b], axis=1)
                pairs, counts = np.unique(stacked, axis=0, return_counts=True)
            self._pair_hist = (pairs, counts.astype(np.int64))
        return self._pair_hist

    def replace(self, **kwargs) -> "SetPairTable":
        fields = {
            "universe_a": self.universe_a,
            "universe_b": self.universe_b,
            "bits_a": self.bits_a,
            "bits_b": self.bits_b,
            "extras": self.extras,
        }
        fields.update(kwargs)
        return SetPairTable(**fields)


def negate_element(table: SetPairTable, dim: str, element: int) -> SetPairTable:
    """Toggle one element's membership bit in every item of a dimension.

    Refocuses the analysis on the element's absence: items that had only
    this element become the empty set, items without it gain the negated
    mark.  Involution: applying twice restores the table bit-for-bit.
    """
    universe = table.universe(dim)
    if not 0 <= element < len(universe):
        raise UnknownElementError(f"element index {element} out of range for {universe.name!r}")
    mask = np.uint64(1 << element)
    if dim == DIM_A:
        return table.replace(
            bits_a=table.bits_a ^ mask,
            universe_a=universe.with_negation_toggled(element),
        )
    return table.replace(
        bits_b=table.bits_b ^ mask,
        universe_b=universe.with_negation_toggled(element),
    )


def reorder_elements(universe: ElementUniverse, permutation: Sequence[int]) -> ElementUniverse:
    """Replace the display order; underlying item bits are untouched."""
    if sorted(permutation) != list(range(len(universe))):
        raise InvalidPermutationError(f"{list(permutation)} is not a permutation")
    return universe.with_display_order(permutation)
