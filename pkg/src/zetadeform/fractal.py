"""Cantor sets, the self-similar set E_2 of sums of 2^-K_j with parts >= 2,
similarity dimensions from the Moran equation, box counting, and sampled
distortion of the correspondence between Cantor points and H_n values."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from mpmath.ctx_iv import MPIntervalContext
import numpy as np

from .compositions import TailSpec, Tail, compositions_upto, first_difference, lex_compare, tau
from .deform_map import Hn_gap, tail_specs_upto
from .enclosure import Enclosure
from .numerics import as_rational, exp_bounds

POINT_LIMIT = 1 << 22


@dataclass(frozen=True)
class FiniteFamily:
    """Maps x -> ratio * x + offset."""

    maps: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        maps = tuple((as_rational(r), as_rational(o)) for r, o in self.maps)
        if len(maps) < 2:
            raise ValueError("need at least two maps")
        if any(not (0 < r < 1) for r, _ in maps):
            raise ValueError("similarity ratios must lie in (0, 1)")
        object.__setattr__(self, "maps", maps)

    def ratio_powers(self, ctx, s):
        return sum(ctx.exp(s * ctx.log(_iv(ctx, r))) for r, _ in self.maps)

    def apply(self, index: int, x: Fraction) -> Fraction:
        r, o = self.maps[index]
        return r * x + o


@dataclass(frozen=True)
class GeometricFamily:
    """Maps alpha_k(x) = base^-k + base^-k x for k >= start."""

    base: int = 2
    start: int = 2

    def __post_init__(self):
        if self.base < 2 or self.start < 1:
            raise ValueError("need base >= 2 and start >= 1")

    def ratio_powers(self, ctx, s):
        # sum_{k>=start} base^(-k s) = base^(-start s) / (1 - base^(-s))
        q = ctx.exp(-s * ctx.log(ctx.mpf(self.base)))
        return q ** self.start / (1 - q)

    def apply(self, k: int, x: Fraction) -> Fraction:
        if k < self.start:
            raise ValueError(f"map index must be >= {self.start}")
        return Fraction(1, self.base**k) * (1 + x)


E2_FAMILY = GeometricFamily(2, 2)


def cantor_family(m: int) -> FiniteFamily:
    """Two maps of ratio 1/m fixing the ends of [0, 1]."""
    return FiniteFamily(((Fraction(1, m), Fraction(0)), (Fraction(1, m), Fraction(m - 1, m))))


def _iv(ctx, q: Fraction):
    return ctx.mpf(q.numerator) / q.denominator


def _pressure_sign(family, s: Fraction, dps: int) -> int:
    # a private context keeps the working precision local to this call
    ctx = MPIntervalContext()
    ctx.dps = dps
    value = family.ratio_powers(ctx, _iv(ctx, s)) - 1
    if value.a > 0:
        return 1
    if value.b < 0:
        return -1
    return 0


def moran_solve(family, tol=Fraction(1, 10**15)) -> Enclosure:
    """Enclosure of the s in (0, 1] with sum_i r_i^s = 1, by bisection with
    certified interval signs of the left-hand side."""
    tol = as_rational(tol)
    lo, hi = Fraction(0), Fraction(1)
    # the sum at s = 0 is the number of maps (>= 2, or infinite)
    if _pressure_sign(family, hi, 30) > 0:
        raise ValueError("ratios sum above 1: the family overlaps and has no solution in (0, 1]")
    dps = 30 + int(math.log10(1 / float(tol)) if tol < 1 else 0)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        sign = _pressure_sign(family, mid, dps)
        if sign == 0:
            sign = _pressure_sign(family, mid, 4 * dps)
        if sign == 0:
            # mid is (numerically) the root itself: bracket it tightly
            delta = tol / 4
            a, b = max(lo, mid - delta), min(hi, mid + delta)
            if _pressure_sign(family, a, 4 * dps) > 0 and _pressure_sign(family, b, 4 * dps) < 0:
                return Enclosure(a, b)
            raise ArithmeticError(f"cannot certify the sign of the Moran sum near s = {mid}")
        if sign > 0:
            lo = mid
        else:
            hi = mid
    return Enclosure(lo, hi)


def cantor_points(m: int, depth: int) -> list[Fraction]:
    """All sums a_1/m + ... + a_depth/m^depth with a_i in {0, m-1}, sorted."""
    if m < 3:
        raise ValueError("m must be >= 3")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if 1 << depth > POINT_LIMIT:
        raise ValueError(f"2^{depth} points exceed the limit {POINT_LIMIT}")
    points = [Fraction(0)]
    for i in range(1, depth + 1):
        step = Fraction(m - 1, m**i)
        points = points + [p + step for p in points]
    return sorted(points)


def e2_points(depth: int) -> list[Fraction]:
    """All truncations sum_{j<=r} 2^-K_j with parts >= 2 and K_r <= depth."""
    if depth < 2:
        raise ValueError("depth must be >= 2")
    out = set()
    count = 0
    for parts in compositions_upto(depth, min_part=2):
        count += 1
        if count > POINT_LIMIT:
            raise ValueError(f"more than {POINT_LIMIT} points")
        total = Fraction(0)
        K = 0
        for p in parts:
            K += p
            total += Fraction(1, 1 << K)
        out.add(total)
    return sorted(out)


@dataclass(frozen=True)
class DimEstimate:
    value: float
    stderr: float
    eps_range: tuple[float, float]
    counts: tuple[int, ...] = field(default=(), compare=False)

    def to_json(self) -> str:
        return json.dumps({"value": self.value, "stderr": self.stderr, "eps_range": list(self.eps_range)})


def box_count(points: Sequence[Fraction], eps) -> int:
    """Number of half-open boxes [i eps, (i+1) eps) hit by the points."""
    eps = as_rational(eps)
    return len({math.floor(as_rational(p) / eps) for p in points})


def box_count_dim(points: Sequence, eps_schedule: Sequence) -> DimEstimate:
    """Least-squares slope of log N(eps) against log(1/eps)."""
    if len(eps_schedule) < 2:
        raise ValueError("need at least two scales")
    if not points:
        raise ValueError("empty point set")
    pts = [as_rational(p) for p in points]
    eps = [as_rational(e) for e in eps_schedule]
    counts = [box_count(pts, e) for e in eps]
    if len(set(counts)) == 1:
        raise ValueError("degenerate regression: every scale gives the same count")
    x = np.array([-math.log(e) for e in eps])
    y = np.log(np.array(counts, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, residuals, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope = float(coef[0])
    dof = len(x) - 2
    if dof > 0:
        resid = y - A @ coef
        sigma2 = float(resid @ resid) / dof
        stderr = math.sqrt(sigma2 / float(((x - x.mean()) ** 2).sum()))
    else:
        stderr = 0.0
    return DimEstimate(slope, stderr, (float(min(eps)), float(max(eps))), tuple(counts))


def cantor_image_point(n: int, t: TailSpec) -> Fraction:
    """sum_j (n+1)/(n+2)^K_j over the partial sums of the infinite sequence."""
    b = n + 2
    total = Fraction(0)
    K = 0
    for p in t.prefix:
        K += p
        total += Fraction(n + 1, b**K)
    if t.tail is Tail.ONES:
        total += Fraction(1, b**K)
    else:
        total += Fraction(n + 1, b**K * (b * b - 1))
    return total


@dataclass(frozen=True)
class DistortionSample:
    k: TailSpec
    l: TailSpec
    cantor_gap: Fraction
    h_gap: Enclosure
    normalized: Enclosure  # h_gap * (n+2)^(k_1+...+k_r0)


@dataclass(frozen=True)
class DistortionReport:
    samples: tuple[DistortionSample, ...]
    min_ratio: Fraction
    max_ratio: Fraction
    normalized_lo: Fraction
    normalized_hi: Fraction
    lower_bound: Fraction
    upper_bound: Fraction


def hn_image_sample(n: int, W: int | None = None, max_weight: int = 3,
                    max_pairs: int | None = None) -> DistortionReport:
    """Distortion of j_n: Cantor point of k -> H_n(tau(k)) over pairs of
    sequences with prefix weight <= max_weight.

    W is the weight cutoff for H_n.  Ratios are |H gap| / |Cantor gap|; the
    normalised gap multiplies the H gap by (n+2)^(k_1+...+k_r0) and should
    sit inside [n/(n+1), (6n+4) e^((n+2)n)].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    specs = tail_specs_upto(max_weight)

    samples = []
    for k, l in itertools.combinations(specs, 2):
        order = lex_compare(k, l)
        if order == 0:
            continue
        if order < 0:
            k, l = l, k
        if max_pairs is not None and len(samples) >= max_pairs:
            break
        r0 = first_difference(k, l)
        weight = sum(k.head(r0))
        cgap = cantor_image_point(n, k) - cantor_image_point(n, l)
        hgap = Hn_gap(n, tau(l), tau(k), W)
        samples.append(DistortionSample(k, l, cgap, hgap, hgap.scale((n + 2) ** weight)))
    if not samples:
        raise ValueError("no distinct pairs sampled")
    ratios_lo = [s.h_gap.lo / abs(s.cantor_gap) for s in samples]
    ratios_hi = [s.h_gap.hi / abs(s.cantor_gap) for s in samples]
    upper = (6 * n + 4) * exp_bounds((n + 2) * n)[1]
    return DistortionReport(
        tuple(samples),
        min(ratios_lo),
        max(ratios_hi),
        min(s.normalized.lo for s in samples),
        max(s.normalized.hi for s in samples),
        Fraction(n, n + 1),
        upper,
    )


def golden_dimension() -> float:
    return math.log((1 + math.sqrt(5)) / 2) / math.log(2)
