"""The limit maps eta_n and F_n = eta_n o tau^-1, the jump function h_n, the
pure-jump part H_n and the continuous part G_n = F_n + H_n, all as
certified enclosures.

H_n(x) sums h_n(y) over dyadic sites y < x.  Sites are finite binary
strings ending in a 1-bit, and h_n of a site is a pipeline whose operator
sequence is read off the bits: every position integrates once, and a 1-bit
that is not the last one also multiplies by 1 + t_n.  Because all the
operators are linear, the sum over every site below x collapses into a
digit dynamic program with one "free" and one "tight" series per bit
position, instead of one pipeline per site.
"""

from __future__ import annotations

import functools
import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import series as ser
from .compositions import (
    Composition,
    Membership,
    Tail,
    TailSpec,
    as_composition,
    binary_digits,
    classify,
    compositions_upto,
    first_difference,
    lex_compare,
    tail_spec_of,
    tau,
    tau_inverse,
)
from .enclosure import Enclosure
from .exact_deform import tn_exact
from .numerics import as_rational, exp_bounds, exp_harmonic_bounds, round_up, zeta2_bounds
from .series import DEFAULT_ORDER, CertifiedSeries, PipelinePlan, Seed

DEFAULT_DEPTH = 24


@dataclass(frozen=True)
class JumpSite:
    composition: Composition
    point: Fraction
    weight: int

    @classmethod
    def of(cls, composition) -> "JumpSite":
        comp = as_composition(composition)
        if not comp.parts:
            raise ValueError("a jump site needs a non-empty composition")
        point = sum((Fraction(1, 1 << K) for K in comp.prefix_sums()), Fraction(0))
        return cls(comp, point, comp.weight)

    @classmethod
    def at(cls, y) -> "JumpSite":
        """The site at a dyadic y in (0, 1)."""
        y = as_rational(y)
        spec = tail_spec_of(y) if 0 < y < 1 else None
        if spec is None or spec.tail is not Tail.ONES or not spec.prefix.parts:
            raise ValueError(f"{y} is not a dyadic rational in (0, 1)")
        parts = spec.prefix.parts
        return cls.of(parts[:-1] + (parts[-1] - 1,))

    def tail_spec(self) -> TailSpec:
        """(k_1, ..., k_{r-1}, k_r + 1, 1, 1, ...), whose tau is the site."""
        parts = self.composition.parts
        return TailSpec(Composition(parts[:-1] + (parts[-1] + 1,)), Tail.ONES)


def eta_plan(n: int, t: TailSpec) -> PipelinePlan:
    seed = Seed.EN if t.tail is Tail.ONES else Seed.GN
    return PipelinePlan.for_composition(n, t.prefix.parts, seed, include_last=True)


def eta_tail(n: int, t: TailSpec, M: int = DEFAULT_ORDER) -> Enclosure:
    """eta_n of ``prefix ++ (c, c, ...)``: the prefix factors against e_n
    (all-ones tail) or g_n (all-twos tail) of the last partial product."""
    return ser.run_pipeline(eta_plan(n, t), M)


def fn_prefix_enclosure(n: int, x, depth: int = DEFAULT_DEPTH, M: int = DEFAULT_ORDER) -> Enclosure:
    """[T_n(prefix), eta_n(prefix ++ ones)] for the first `depth` parts of tau^-1(x)."""
    prefix = tau_inverse(x, depth)
    lo = tn_exact(n, prefix)
    hi = eta_tail(n, TailSpec(prefix, Tail.ONES), M).hi
    return Enclosure(lo, hi)


def fn_enclosure(n: int, x, depth: int = DEFAULT_DEPTH, M: int = DEFAULT_ORDER) -> Enclosure:
    """F_n(x).

    Always valid: T_n(prefix) < F_n(x) < eta_n(prefix ++ ones).  When x is
    tau of a prefix-then-constant sequence the exact tail enclosure is
    intersected in.
    """
    x = as_rational(x)
    enc = fn_prefix_enclosure(n, x, depth, M)
    spec = tail_spec_of(x, max_weight=4 * depth + 64)
    if spec is not None:
        exact = eta_tail(n, spec, M)
        enc = Enclosure(max(enc.lo, exact.lo), min(enc.hi, exact.hi))
    return enc


def fn_gap_bound(n: int, weight: int) -> Fraction:
    """Upper bound on eta_n(prefix ++ ones) - T_n(prefix) for a prefix of the
    given weight: sum_{m>=1} (1+log n)^m/m! * e^(2n) / 2^weight."""
    # e^(1 + log n) - 1 = e*n - 1
    e_hi = exp_bounds(1)[1]
    e2n_hi = exp_bounds(2 * n)[1]
    return (e_hi * n - 1) * e2n_hi / (1 << weight)


def hn_plan(n: int, site: JumpSite) -> PipelinePlan:
    return PipelinePlan.for_composition(n, site.composition.parts, Seed.DELTA, include_last=False)


def hn_value(n: int, site, M: int = DEFAULT_ORDER) -> Enclosure:
    """h_n at a dyadic site: the prefix factors (all but the last block end)
    against Delta_n of the full partial product."""
    if not isinstance(site, JumpSite):
        site = JumpSite.of(site)
    return ser.run_pipeline(hn_plan(n, site), M)


def hn_bounds(n: int, weight: int) -> tuple[Fraction, Fraction]:
    """Lower and upper bounds (n/(n+1))/(n+2)^K and 2n e^((n+2)n)/(n+2)^K."""
    scale = Fraction(1, (n + 2) ** weight)
    return Fraction(n, n + 1) * scale, 2 * n * exp_bounds((n + 2) * n)[1] * scale


def jump_mass_bound(n: int) -> Fraction:
    """2 e^((n+2)n), a bound on the sum of h_n over every site (rounded up)."""
    return 2 * exp_bounds((n + 2) * n)[1]


def weight_tail(n: int, W: int) -> Fraction:
    """Bound on the h_n mass of all sites of weight > W.

    There are 2^(K-1) sites of weight K, each at most 2n e^((n+2)n)/(n+2)^K;
    the geometric sum over K > W is (n+2) e^((n+2)n) (2/(n+2))^(W+1).
    """
    e_hi = exp_bounds((n + 2) * n)[1]
    return round_up((n + 2) * e_hi * Fraction(2, n + 2) ** (W + 1))


def default_weight_cutoff(n: int, target=Fraction(1, 10**6)) -> int:
    W = 1
    while weight_tail(n, W) > target:
        W += 1
    return W


class _FreeSums:
    """Phi^j(0) for Phi(S) = I(Delta + S + (1 + t_n) S): the summed operator
    image of every bit string of length <= j ending in a 1-bit."""

    def __init__(self):
        self._lock = threading.Lock()
        self._chains: dict[tuple[int, int], list[CertifiedSeries]] = {}

    def get(self, n: int, M: int, j: int) -> CertifiedSeries:
        with self._lock:
            chain = self._chains.setdefault((n, M), [ser.zero(M)])
            while len(chain) <= j:
                prev = chain[-1]
                chain.append(_step(n, M, prev, prev))
            return chain[j]


def _step(n: int, M: int, zero_branch: CertifiedSeries, one_branch: CertifiedSeries,
          end_here: bool = True) -> CertifiedSeries:
    """One bit position: a 0-bit continuing into `zero_branch`, a 1-bit
    continuing into `one_branch` (multiplied by 1 + t_n), and optionally a
    1-bit ending the site (Delta_n)."""
    total = zero_branch + ser.op_mul_one_plus_tn(one_branch, n)
    if end_here:
        total = total + ser.series_delta(n, M)
    return ser.op_integrate(total)


_free = _FreeSums()


def hn_partial_series(n: int, x, W: int, M: int = DEFAULT_ORDER) -> CertifiedSeries:
    """Summed series of every site y < x with weight <= W (before evaluation at 1)."""
    x = as_rational(x)
    bits = binary_digits(x, W)
    # tight[i]: sites agreeing with x on bits 1..i-1, not yet below x
    tight = ser.zero(M)
    for i in range(W, 0, -1):
        if bits[i - 1]:
            # 0-bit drops below x; 1-bit may end here (x keeps more 1-bits after)
            free_next = _free.get(n, M, W - i)
            tight = _step(n, M, free_next, tight)
        else:
            tight = ser.op_integrate(tight)
    return tight


def Hn_value(n: int, x, W: int | None = None, M: int = DEFAULT_ORDER) -> Enclosure:
    """H_n(x) = sum of h_n(y) over dyadic sites y < x (left-continuous)."""
    x = as_rational(x)
    if not (0 < x <= 1):
        raise ValueError(f"x must lie in (0, 1]: {x}")
    if W is None:
        W = default_weight_cutoff(n)
    if W < 1:
        raise ValueError("weight cutoff must be >= 1")
    partial = _partial_sum(n, x, W, M)
    return Enclosure(partial.lo, partial.hi + weight_tail(n, W))


@functools.lru_cache(maxsize=4096)
def _partial_sum(n: int, x: Fraction, W: int, M: int) -> Enclosure:
    return ser.eval_at_one(hn_partial_series(n, x, W, M))


def Hn_gap(n: int, a, b, W: int | None = None, M: int = DEFAULT_ORDER) -> Enclosure:
    """H_n(b) - H_n(a) for a < b: the sites in [a, b) of weight <= W plus at
    most the weight tail."""
    a, b = as_rational(a), as_rational(b)
    if not (0 < a < b <= 1):
        raise ValueError(f"need 0 < a < b <= 1, got {a}, {b}")
    if W is None:
        W = default_weight_cutoff(n)
    upper = _partial_sum(n, b, W, M)
    lower = _partial_sum(n, a, W, M)
    return Enclosure(max(upper.lo - lower.hi, Fraction(0)), upper.hi - lower.lo + weight_tail(n, W))


def Hn_right_limit(n: int, x, W: int | None = None, M: int = DEFAULT_ORDER) -> Enclosure:
    """H_n(x+): adds h_n(x) when x is a site."""
    value = Hn_value(n, x, W, M)
    x = as_rational(x)
    if x < 1 and tail_spec_of(x) is not None and tail_spec_of(x).tail is Tail.ONES:
        value = value + hn_value(n, JumpSite.at(x), M)
    return value


def Hn_enumerate(n: int, x, W: int, M: int = DEFAULT_ORDER) -> Enclosure:
    """H_n(x) by listing every site of weight <= W below x; for cross-checks."""
    x = as_rational(x)
    lo = hi = Fraction(0)
    for parts in compositions_upto(W):
        site = JumpSite.of(parts)
        if site.point < x:
            enc = hn_value(n, site, M)
            lo += enc.lo
            hi += enc.hi
    return Enclosure(lo, hi + weight_tail(n, W))


def jump_partial_sums(n: int, W: int, M: int = DEFAULT_ORDER) -> list[Enclosure]:
    """Enclosures of sum h_n over all sites of weight <= w, for w = 1..W."""
    return [ser.eval_at_one(_free.get(n, M, w)) for w in range(1, W + 1)]


def Gn_value(n: int, x, depth: int = DEFAULT_DEPTH, W: int | None = None,
             M: int = DEFAULT_ORDER) -> Enclosure:
    """G_n(x) = F_n(x) + H_n(x)."""
    return fn_enclosure(n, x, depth, M) + Hn_value(n, x, W, M)


@dataclass(frozen=True)
class PreimageResult:
    interval: Enclosure
    f_left: Enclosure
    f_right: Enclosure
    reached_tol: bool


def fn_preimage(n: int, y0, tol=Fraction(1, 1 << 30), M: int = DEFAULT_ORDER,
                max_steps: int = 200) -> PreimageResult:
    """Dyadic bisection for x with F_n(x) = y0.

    Keeps a bracket [a, b] with F_n(a) < y0 < F_n(b).  F_n only jumps
    downward (F_n = G_n - H_n, G_n continuous, H_n increasing), so the
    bracket always holds a point where F_n crosses y0 continuously.
    """
    y0 = as_rational(y0)
    tol = as_rational(tol)
    top = exp_harmonic_bounds(n)
    if not (1 < y0 < top[0]):
        raise ValueError(f"target must lie strictly between 1 and e^(1+...+1/n); got {float(y0)}")

    def F(x):
        spec = tail_spec_of(x)
        return eta_tail(n, spec, M)

    b = Fraction(1)
    fb = F(b)
    a = Fraction(1, 2)
    fa = F(a)
    while not fa.hi < y0:
        if fa.lo <= y0:
            # the enclosure at a already straddles y0
            return PreimageResult(Enclosure(a, a), fa, fa, True)
        a /= 2
        fa = F(a)
        if a < Fraction(1, 1 << 400):
            raise ValueError("no left bracket found")
    steps = 0
    while b - a > tol and steps < max_steps:
        mid = (a + b) / 2
        fm = F(mid)
        if fm.hi < y0:
            a, fa = mid, fm
        elif fm.lo > y0:
            b, fb = mid, fm
        else:
            # enclosure straddles y0: mid is as good as the budget allows
            return PreimageResult(Enclosure(mid, mid), fm, fm, True)
        steps += 1
    return PreimageResult(Enclosure(a, b), fa, fb, b - a <= tol)


def c1_enclosure() -> Enclosure:
    """min{7/4 - zeta(2), 1/3}; here 7/4 - zeta(2) ~ 0.105 is the smaller."""
    z_lo, z_hi = zeta2_bounds()
    enc = Enclosure(Fraction(7, 4) - z_hi, Fraction(7, 4) - z_lo)
    assert enc.hi < Fraction(1, 3)
    return enc


def c2_enclosure(n: int) -> Enclosure:
    lo, hi = exp_bounds(2 * n)
    return Enclosure(n * lo, n * hi)


def bilipschitz_ratio(n: int, k: TailSpec, l: TailSpec, M: int = DEFAULT_ORDER
                      ) -> tuple[Enclosure, tuple[Enclosure, Enclosure]]:
    """(eta_n(k) - eta_n(l)) * 2^(k_1+...+k_r0) with r0 the first differing
    index, together with enclosures of the constants (c_1, c_2)."""
    for t in (k, l):
        if Membership.IN_T2 not in classify(t):
            raise ValueError(f"{t} has a part below 2")
    if lex_compare(k, l) != 1:
        raise ValueError("expected k to rank strictly above l")
    r0 = first_difference(k, l)
    weight = sum(k.head(r0))
    diff = eta_tail(n, k, M) - eta_tail(n, l, M)
    return diff.scale(1 << weight), (c1_enclosure(), c2_enclosure(n))


def tail_specs_upto(max_weight: int, min_part: int = 1, tails: Iterable[Tail] = (Tail.ONES, Tail.TWOS)
                    ) -> list[TailSpec]:
    """Distinct TailSpecs (canonical forms) with prefix weight <= max_weight."""
    seen = {}
    for tail in tails:
        for parts in compositions_upto(max_weight, min_part=min_part, include_empty=True):
            spec = TailSpec(Composition(parts), tail).canonical()
            seen.setdefault(spec, None)
    return list(seen)


@dataclass(frozen=True)
class OrderWitness:
    k: TailSpec
    l: TailSpec
    eta_k: Enclosure
    eta_l: Enclosure


def order_witness_search(n: int, budget: int = 10_000, max_weight: int = 6,
                         M: int = DEFAULT_ORDER) -> OrderWitness | None:
    """First pair k > l (not both all-parts->=2) with eta_n(k) certified
    below eta_n(l), within `budget` pair examinations."""
    specs = tail_specs_upto(max_weight)
    values: dict[TailSpec, Enclosure] = {}

    def eta(t):
        if t not in values:
            values[t] = eta_tail(n, t, M)
        return values[t]

    examined = 0
    for k, l in itertools.permutations(specs, 2):
        both_t2 = Membership.IN_T2 in classify(k) and Membership.IN_T2 in classify(l)
        if both_t2 or lex_compare(k, l) != 1:
            continue
        if examined >= budget:
            return None
        examined += 1
        ek, el = eta(k), eta(l)
        if ek.hi < el.lo:
            return OrderWitness(k, l, ek, el)
    return None


def sample_points(count: int, max_weight: int = 10) -> list[Fraction]:
    """Deterministic sorted sample of `count` points of (0, 1] mixing dyadic
    sites and all-twos points, spread by rank."""
    pool = sorted({tau(t) for t in tail_specs_upto(max_weight)})
    if count >= len(pool):
        return pool
    step = Fraction(len(pool) - 1, count - 1)
    return [pool[math.floor(i * step)] for i in range(count)]


def curve_rows(function: str, n: int, xs: Sequence[Fraction], depth: int = DEFAULT_DEPTH,
               W: int | None = None, M: int = DEFAULT_ORDER) -> list[tuple[Fraction, Enclosure]]:
    evaluators = {
        "fn": lambda x: fn_enclosure(n, x, depth, M),
        "hn": lambda x: Hn_value(n, x, W, M),
        "gn": lambda x: Gn_value(n, x, depth, W, M),
    }
    if function not in evaluators:
        raise ValueError(f"unknown curve function {function!r}; expected fn, hn or gn")
    f = evaluators[function]
    return [(x, f(x)) for x in sorted(xs)]
