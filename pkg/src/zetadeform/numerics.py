"""Exact rational helpers: parsing, formatting, outward rounding, and
rigorous rational bounds for a handful of transcendental constants."""

from __future__ import annotations

import math
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache

ExactRational = Fraction

# bits of relative precision kept when a bound is rounded outward
ROUND_BITS = 96


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse "num/den", an integer, or a terminating decimal exactly."""
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        raise ValueError(f"not a rational number: {text!r}") from None


def fmt_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def round_up(q: Fraction, bits: int = ROUND_BITS) -> Fraction:
    """Smallest dyadic >= q with roughly `bits` significant bits."""
    if q <= 0:
        return -round_down(-q, bits)
    shift = bits - (q.numerator.bit_length() - q.denominator.bit_length())
    if shift <= 0:
        return Fraction(-((-q.numerator) // q.denominator))
    scaled = q * (1 << shift)
    return Fraction(-((-scaled.numerator) // scaled.denominator), 1 << shift)


def round_down(q: Fraction, bits: int = ROUND_BITS) -> Fraction:
    if q <= 0:
        return -round_up(-q, bits)
    shift = bits - (q.numerator.bit_length() - q.denominator.bit_length())
    if shift <= 0:
        return Fraction(q.numerator // q.denominator)
    scaled = q * (1 << shift)
    return Fraction(scaled.numerator // scaled.denominator, 1 << shift)


def decimal_floor(q: Fraction, digits: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits + 40
        ctx.rounding = ROUND_FLOOR
        d = Decimal(q.numerator) / Decimal(q.denominator)
        return d.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_FLOOR)


def decimal_ceil(q: Fraction, digits: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits + 40
        ctx.rounding = ROUND_CEILING
        d = Decimal(q.numerator) / Decimal(q.denominator)
        return d.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_CEILING)


def exp_bounds(x, eps=Fraction(1, 10**40)) -> tuple[Fraction, Fraction]:
    """Rational (lo, hi) with lo <= e**x <= hi, for 0 <= x.

    Partial sums of the exponential series are lower bounds; the remainder
    after N terms is at most x^(N+1)/(N+1)! * 1/(1 - x/(N+2)) once N+2 > x.
    """
    x = as_rational(x)
    eps = as_rational(eps)
    if x < 0:
        lo, hi = exp_bounds(-x, eps)
        return 1 / hi, 1 / lo
    # keep enough bits that rounding stays well below eps
    bits = max(160, eps.denominator.bit_length() - eps.numerator.bit_length() + 32)
    total = Fraction(0)
    term = Fraction(1)
    k = 0
    while True:
        total += term
        k += 1
        term = term * x / k
        if k + 1 > x:
            rem = term / (1 - x / (k + 1))
            if rem <= eps * total:
                return round_down(total, bits), round_up(total + rem, bits)


@lru_cache(maxsize=None)
def exp_harmonic_bounds(n: int) -> tuple[Fraction, Fraction]:
    """Bounds on e^(1 + 1/2 + ... + 1/n)."""
    return exp_bounds(harmonic(n), Fraction(1, 10**60))


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


@lru_cache(maxsize=None)
def zeta2_bounds(terms: int = 10) -> tuple[Fraction, Fraction]:
    """Bounds on zeta(2) = pi^2/6 from a partial sum plus an Euler-Maclaurin tail.

    With K = N + 1, the tail sum_{j >= K} 1/j^2 equals
    1/K + 1/(2K^2) + 1/(6K^3) - 1/(30K^5) + ...; 1/x^2 is completely
    monotone, so the truncations alternate around the tail and the last two
    bracket it.  N = 10 pins zeta(2) to about 2e-7.
    """
    partial = sum((Fraction(1, j * j) for j in range(1, terms + 1)), Fraction(0))
    K = Fraction(terms + 1)
    upper = 1 / K + 1 / (2 * K**2) + 1 / (6 * K**3)
    lower = upper - 1 / (30 * K**5)
    return partial + lower, partial + upper


def sci_ceil(q: Fraction, sig: int = 2) -> str:
    """q >= 0 in scientific notation with `sig` digits, rounded up."""
    q = as_rational(q)
    if q < 0:
        raise ValueError("expected a nonnegative value")
    if q == 0:
        return "0"
    e = len(str(q.numerator)) - len(str(q.denominator))
    # settle e = floor(log10 q) exactly
    while Fraction(10) ** e > q:
        e -= 1
    while Fraction(10) ** (e + 1) <= q:
        e += 1
    scale = Fraction(10) ** (e - sig + 1)
    mant = math.ceil(q / scale)
    if mant >= 10**sig:
        mant //= 10
        e += 1
    digits = str(mant)
    return f"{digits[0]}.{digits[1:]}e{e:+03d}" if sig > 1 else f"{digits}e{e:+03d}"
