"""Index sequences, the binary map tau onto (0, 1], and the order on sequences.

A composition is a finite tuple of positive integers.  An infinite index
sequence is only ever handled in the form ``prefix ++ (c, c, c, ...)`` with
``c`` in {1, 2}; see :class:`TailSpec`.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .numerics import as_rational


@dataclass(frozen=True)
class Composition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"composition parts must be >= 1: {parts}")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "_weight", sum(parts))

    @property
    def weight(self) -> int:
        return self._weight

    @property
    def depth(self) -> int:
        return len(self.parts)

    def prefix_sums(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate(self.parts))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __add__(self, other) -> "Composition":
        return Composition(self.parts + tuple(other))

    def text(self) -> str:
        return ",".join(map(str, self.parts))

    def __str__(self) -> str:
        return "(" + self.text() + ")"

    @classmethod
    def parse(cls, text: str) -> "Composition":
        text = text.strip().strip("()")
        if not text:
            return cls(())
        return cls(tuple(int(tok) for tok in text.split(",")))


def as_composition(value) -> Composition:
    if isinstance(value, Composition):
        return value
    if isinstance(value, str):
        return Composition.parse(value)
    return Composition(tuple(value))


class Tail(enum.Enum):
    ONES = 1
    TWOS = 2


class Membership(enum.Flag):
    IN_T = enum.auto()
    IN_T2 = enum.auto()
    IN_TR = enum.auto()


@dataclass(frozen=True)
class TailSpec:
    """The infinite sequence ``prefix ++ (c, c, ...)`` with c = tail.value."""

    prefix: Composition
    tail: Tail

    def __post_init__(self):
        object.__setattr__(self, "prefix", as_composition(self.prefix))
        if not isinstance(self.tail, Tail):
            object.__setattr__(self, "tail", Tail(self.tail))

    def entry(self, i: int) -> int:
        """0-based entry of the infinite sequence."""
        if i < len(self.prefix):
            return self.prefix[i]
        return self.tail.value

    def head(self, count: int) -> tuple[int, ...]:
        return tuple(self.entry(i) for i in range(count))

    def canonical(self) -> "TailSpec":
        """Drop prefix entries that merely repeat the tail value."""
        parts = list(self.prefix.parts)
        while parts and parts[-1] == self.tail.value:
            parts.pop()
        return TailSpec(Composition(tuple(parts)), self.tail)

    def text(self) -> str:
        return self.prefix.text() + ("+1*" if self.tail is Tail.ONES else "+2*")

    def __str__(self) -> str:
        return self.text()

    @classmethod
    def parse(cls, text: str) -> "TailSpec":
        text = text.strip()
        for suffix, tail in (("+1*", Tail.ONES), ("+2*", Tail.TWOS)):
            if text.endswith(suffix):
                return cls(Composition.parse(text[: -len(suffix)]), tail)
        raise ValueError(f"tail spec must end with '+1*' or '+2*': {text!r}")


def ones(prefix=()) -> TailSpec:
    return TailSpec(as_composition(prefix), Tail.ONES)


def twos(prefix=()) -> TailSpec:
    return TailSpec(as_composition(prefix), Tail.TWOS)


@dataclass(frozen=True)
class DyadicPoint:
    value: Fraction
    exponent: int

    def __post_init__(self):
        if not (0 < self.value <= 1):
            raise ValueError("dyadic point must lie in (0, 1]")
        if (self.value * (1 << self.exponent)).denominator != 1:
            raise ValueError(f"{self.value} * 2^{self.exponent} is not an integer")


def lex_compare(k: TailSpec, l: TailSpec) -> int:
    """+1 if k > l in the order where a smaller entry ranks higher, 0 if equal, -1 otherwise."""
    horizon = max(len(k.prefix), len(l.prefix))
    for i in range(horizon + 1):
        a, b = k.entry(i), l.entry(i)
        if a != b:
            return 1 if a < b else -1
    # beyond the horizon both sequences are constant
    return 0


def tau(t: TailSpec) -> Fraction:
    """Sum of 2^-K_j over all partial sums K_j of the infinite sequence."""
    total = Fraction(0)
    weight = 0
    for part in t.prefix:
        weight += part
        total += Fraction(1, 1 << weight)
    if t.tail is Tail.ONES:
        # sum_{m>=1} 2^-(K+m) = 2^-K
        total += Fraction(1, 1 << weight)
    else:
        # sum_{m>=1} 4^-m * 2^-K = 2^-K / 3
        total += Fraction(1, 3 << weight)
    return total


def dyadic_point(t: TailSpec) -> DyadicPoint:
    if t.tail is not Tail.ONES:
        raise ValueError("only all-ones tails map to dyadic rationals")
    return DyadicPoint(tau(t), t.prefix.weight)


def binary_digits(x, count: int) -> list[int]:
    """First `count` binary digits of x in (0, 1], using the expansion with
    infinitely many 1-bits (so 1/2 = 0.0111...)."""
    x = _unit_interval(x)
    bits = []
    for _ in range(count):
        x *= 2
        if x > 1:
            bits.append(1)
            x -= 1
        else:
            bits.append(0)
    return bits


def tau_inverse(x, depth: int) -> Composition:
    """First `depth` parts of the sequence k with tau(k) = x."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    x = _unit_interval(x)
    parts = []
    gap = 0
    while len(parts) < depth:
        x *= 2
        gap += 1
        if x > 1:
            parts.append(gap)
            gap = 0
            x -= 1
    return Composition(tuple(parts))


def tail_spec_of(x, max_weight: int = 4096) -> TailSpec | None:
    """Exact TailSpec t with tau(t) = x when x is dyadic or of the form
    tau(prefix ++ (2, 2, ...)); None otherwise."""
    x = _unit_interval(x)
    odd = x.denominator
    while odd % 2 == 0:
        odd //= 2
    if odd not in (1, 3):
        return None
    parts: list[int] = []
    gap = 0
    for _ in range(max_weight + 1):
        # remainder 1 is 0.111..., remainder 1/3 is 0.0101...
        if x == 1:
            return TailSpec(Composition(tuple(parts) + (gap + 1,)), Tail.ONES).canonical()
        if x == Fraction(1, 3):
            return TailSpec(Composition(tuple(parts) + (gap + 2,)), Tail.TWOS).canonical()
        x *= 2
        gap += 1
        if x > 1:
            parts.append(gap)
            gap = 0
            x -= 1
    return None


def _unit_interval(x) -> Fraction:
    x = as_rational(x)
    if not (0 < x <= 1):
        raise ValueError(f"x must lie in (0, 1]: {x}")
    return x


def classify(t: TailSpec) -> Membership:
    flags = Membership.IN_T
    if t.tail is Tail.TWOS and all(p >= 2 for p in t.prefix):
        flags |= Membership.IN_T2
    if t.tail is Tail.ONES and any(p >= 2 for p in t.prefix):
        flags |= Membership.IN_TR
    return flags


def compositions_of(weight: int, min_part: int = 1, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """All compositions of `weight` with parts in [min_part, max_part], lexicographic."""
    if weight == 0:
        yield ()
        return
    top = weight if max_part is None else min(max_part, weight)
    for first in range(min_part, top + 1):
        for rest in compositions_of(weight - first, min_part, max_part):
            yield (first,) + rest


def compositions_upto(max_weight: int, min_part: int = 1, max_part: int | None = None,
                      include_empty: bool = False) -> Iterator[tuple[int, ...]]:
    """By weight ascending, then lexicographic."""
    for w in range(0 if include_empty else 1, max_weight + 1):
        yield from compositions_of(w, min_part, max_part)


def first_difference(k: TailSpec, l: TailSpec) -> int | None:
    """1-based index r0 of the first differing entry, or None if equal."""
    horizon = max(len(k.prefix), len(l.prefix))
    for i in range(horizon + 1):
        if k.entry(i) != l.entry(i):
            return i + 1
    return None


def head_weight(t: TailSpec, count: int) -> int:
    return sum(t.head(count))


def sequences_equal(seq: Sequence[int], t: TailSpec) -> bool:
    return tuple(seq) == t.head(len(seq))
