"""Seeded synthetic dataset generators.

Randomness comes from SplitMix64 used as a counter-based stream: draw j of
item i is the SplitMix64 output for counter ``i * DRAWS_PER_ITEM + j``
under the dataset seed.  That makes generation bit-identical across
platforms and trivially parallelizable by item index, with any prefix of a
dataset statistically identical to a standalone smaller run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidConfigError, InvalidProbabilityError
from .model import ElementUniverse, SetPairTable

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

DRAWS_PER_ITEM = 16

S_VARIANTS = ("S1", "S2", "S3", "S4", "S5", "S6")


def _mix(state: np.ndarray) -> np.ndarray:
    z = state.copy()
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def draws(seed: int, items: np.ndarray, slot: int) -> np.ndarray:
    """One uint64 draw per item: SplitMix64 output at the item's counter."""
    counter = items.astype(np.uint64) * np.uint64(DRAWS_PER_ITEM) + np.uint64(slot)
    with np.errstate(over="ignore"):
        state = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (counter + np.uint64(1)) * _GOLDEN) & _MASK64
        return _mix(state)


def uniforms(seed: int, items: np.ndarray, slot: int) -> np.ndarray:
    """Per-item doubles in [0, 1) from the top 53 bits of a draw."""
    return (draws(seed, items, slot) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


@dataclass(frozen=True)
class SVariantSpec:
    """One of the co-occurrence families over {a1..a4} x {b1..b4}."""

    variant: str
    n: int
    seed: int

    def __post_init__(self):
        if self.variant not in S_VARIANTS:
            raise InvalidConfigError(f"unknown variant {self.variant!r}")
        if self.n <= 0:
            raise InvalidConfigError("item count must be positive")


def gen_s(spec: SVariantSpec) -> SetPairTable:
    """Generate one of the S1..S6 families.

    The a-side set is uniform over all 16 subsets in every variant.  The
    b-side is: S1 the matching subset, S2 its complement, S3 a per-item
    fair coin between those two rules, S4/S5 the matching subset for
    50%/12.5% of items and independent uniform otherwise, S6 independent
    uniform.  Draw slots: 0 a-bits, 1 mixture decider, 2 independent
    b-bits.
    """
    items = np.arange(spec.n, dtype=np.uint64)
    bits_a = draws(spec.seed, items, 0) & np.uint64(0xF)
    complement = bits_a ^ np.uint64(0xF)
    decider = uniforms(spec.seed, items, 1)
    independent = draws(spec.seed, items, 2) & np.uint64(0xF)

    if spec.variant == "S1":
        bits_b = bits_a
    elif spec.variant == "S2":
        bits_b = complement
    elif spec.variant == "S3":
        bits_b = np.where(decider < 0.5, bits_a, complement)
    elif spec.variant == "S4":
        bits_b = np.where(decider < 0.5, bits_a, independent)
    elif spec.variant == "S5":
        bits_b = np.where(decider < 0.125, bits_a, independent)
    else:
        bits_b = independent

    universe_a = ElementUniverse("A", ("a1", "a2", "a3", "a4"))
    universe_b = ElementUniverse("B", ("b1", "b2", "b3", "b4"))
    return SetPairTable(universe_a, universe_b, bits_a, bits_b)


@dataclass(frozen=True)
class OutputRule:
    """Inclusion probability of one output element given the input set.

    p = base + sum(weights over present input elements)
             + card_weight * |input set|
    The rule table validates that p stays in [0, 1] for every input subset.
    """

    base: float
    weights: tuple[float, ...]
    card_weight: float = 0.0


@dataclass(frozen=True)
class DriveRuleTable:
    """Parameterized co-occurrence rules for the trips-style generator."""

    input_elements: tuple[str, ...]
    output_elements: tuple[str, ...]
    input_p: tuple[float, ...]
    rules: tuple[OutputRule, ...]

    def __post_init__(self):
        if len(self.input_p) != len(self.input_elements):
            raise InvalidConfigError("input_p must match input element count")
        if len(self.rules) != len(self.output_elements):
            raise InvalidConfigError("one rule per output element required")
        if len(self.input_elements) > 16:
            raise InvalidConfigError("rule validation supports at most 16 input elements")
        for p in self.input_p:
            if not 0.0 <= p <= 1.0:
                raise InvalidProbabilityError(f"input probability {p} outside [0, 1]")
        for rule, name in zip(self.rules, self.output_elements):
            if len(rule.weights) != len(self.input_elements):
                raise InvalidConfigError(f"rule for {name!r} has wrong weight count")
            for bits in range(1 << len(self.input_elements)):
                p = self.probability(rule, bits)
                if not 0.0 <= p <= 1.0:
                    raise InvalidProbabilityError(
                        f"rule for {name!r} yields probability {p} on input 0x{bits:x}"
                    )

    def probability(self, rule: OutputRule, input_bits: int) -> float:
        p = rule.base + rule.card_weight * input_bits.bit_count()
        for e, w in enumerate(rule.weights):
            if (input_bits >> e) & 1:
                p += w
        return p


def default_drive_rules() -> DriveRuleTable:
    """Shipped rule table; a reconstruction targeting qualitative patterns:
    the loud outcome is frequent and often nearly alone, speed is elevated
    under sporty/aggressive inputs, the cheap outcome grows with input
    cardinality and responsibility shrinks under aggression."""
    inputs = ("Music", "Family", "Traffic", "Sport", "Aggr")
    outputs = ("Fun", "Resp", "Fast", "Cheap", "Loud")
    rules = (
        OutputRule(0.62, (0.10, 0.04, -0.18, 0.08, 0.04), -0.09),   # Fun
        OutputRule(0.55, (0.00, 0.15, 0.00, -0.10, -0.25), -0.05),  # Resp
        OutputRule(0.18, (0.04, 0.00, -0.10, 0.25, 0.30), 0.00),    # Fast
        OutputRule(0.15, (0.02, 0.00, 0.06, 0.00, 0.00), 0.09),     # Cheap
        OutputRule(0.70, (0.00, -0.06, 0.00, 0.06, 0.10), 0.00),    # Loud
    )
    return DriveRuleTable(inputs, outputs, (0.5,) * 5, rules)


def gen_drives(n: int, seed: int, rules: DriveRuleTable | None = None) -> SetPairTable:
    """Generate a trips-style table from a rule table, deterministically.

    Draw slots: 0..len(inputs)-1 input element coins, then one slot per
    output element.
    """
    if n <= 0:
        raise InvalidConfigError("item count must be positive")
    table = rules or default_drive_rules()
    items = np.arange(n, dtype=np.uint64)
    n_in = len(table.input_elements)
    if n_in + len(table.output_elements) > DRAWS_PER_ITEM:
        raise InvalidConfigError(
            f"rule table needs more than {DRAWS_PER_ITEM} draw slots per item"
        )

    bits_a = np.zeros(n, dtype=np.uint64)
    for e, p in enumerate(table.input_p):
        hit = uniforms(seed, items, e) < p
        bits_a |= hit.astype(np.uint64) << np.uint64(e)

    # Precompute each rule's probability for all possible input subsets.
    prob_lut = np.empty((len(table.rules), 1 << n_in), dtype=np.float64)
    for r, rule in enumerate(table.rules):
        for bits in range(1 << n_in):
            prob_lut[r, bits] = table.probability(rule, bits)

    bits_b = np.zeros(n, dtype=np.uint64)
    input_idx = bits_a.astype(np.int64)
    for r in range(len(table.rules)):
        p = prob_lut[r][input_idx]
        hit = uniforms(seed, items, n_in + r) < p
        bits_b |= hit.astype(np.uint64) << np.uint64(r)

    universe_a = ElementUniverse("Input", table.input_elements)
    universe_b = ElementUniverse("Output", table.output_elements)
    return SetPairTable(universe_a, universe_b, bits_a, bits_b)
