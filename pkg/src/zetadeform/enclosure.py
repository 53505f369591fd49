"""Closed rational intervals certifying real values."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .numerics import as_rational, decimal_ceil, decimal_floor, fmt_rational, sci_ceil


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure: lo={self.lo} > hi={self.hi}")

    @classmethod
    def point(cls, q) -> "Enclosure":
        q = as_rational(q)
        return cls(q, q)

    @classmethod
    def of(cls, lo, hi) -> "Enclosure":
        return cls(as_rational(lo), as_rational(hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value) -> bool:
        if isinstance(value, Enclosure):
            return self.lo <= value.lo and value.hi <= self.hi
        q = as_rational(value)
        return self.lo <= q <= self.hi

    def intersects(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def certainly_below(self, other: "Enclosure") -> bool:
        return self.hi < other.lo

    def certainly_above(self, other: "Enclosure") -> bool:
        return self.lo > other.hi

    def __add__(self, other):
        if isinstance(other, Enclosure):
            return Enclosure(self.lo + other.lo, self.hi + other.hi)
        q = as_rational(other)
        return Enclosure(self.lo + q, self.hi + q)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Enclosure):
            return Enclosure(self.lo - other.hi, self.hi - other.lo)
        q = as_rational(other)
        return Enclosure(self.lo - q, self.hi - q)

    def __rsub__(self, other):
        q = as_rational(other)
        return Enclosure(q - self.hi, q - self.lo)

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def scale(self, factor) -> "Enclosure":
        q = as_rational(factor)
        if q >= 0:
            return Enclosure(self.lo * q, self.hi * q)
        return Enclosure(self.hi * q, self.lo * q)

    def __mul__(self, other):
        if not isinstance(other, Enclosure):
            return self.scale(other)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Enclosure(min(products), max(products))

    __rmul__ = __mul__

    def hull(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def to_json(self) -> dict:
        return {"lo": fmt_rational(self.lo), "hi": fmt_rational(self.hi)}

    @classmethod
    def from_json(cls, data: dict) -> "Enclosure":
        return cls(Fraction(data["lo"]), Fraction(data["hi"]))

    def decimal(self, digits: int = 15) -> tuple[Decimal, Decimal]:
        """Outward-rounded decimal endpoints."""
        return decimal_floor(self.lo, digits), decimal_ceil(self.hi, digits)

    def describe(self, digits: int = 15) -> str:
        lo, hi = self.decimal(digits)
        return f"[{lo}, {hi}] ±{sci_ceil(self.width)}"

    def __str__(self) -> str:
        return self.describe()
