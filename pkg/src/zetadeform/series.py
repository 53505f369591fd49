"""Certified truncated power series on [0, 1].

A :class:`CertifiedSeries` of order M stands for a function f with
nonnegative Taylor coefficients such that

    0 <= f(u) - sum_{m <= M} c_m u^m <= tail_bound * u^(M+1)   for u in [0, 1].

Two operators realise every iterated integral in the package: multiplying
by ``1 + t_n(u)`` where ``t_n(u) = u + ... + u^n``, and ``u -> int_0^1
f(u x) dx``.  A :class:`PipelinePlan` strings them together.
"""

from __future__ import annotations

import enum
import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .enclosure import Enclosure
from .numerics import exp_harmonic_bounds, fmt_rational, round_up

DEFAULT_ORDER = 60


@dataclass(frozen=True)
class CertifiedSeries:
    coeffs: tuple[Fraction, ...]
    tail_bound: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "tail_bound", Fraction(self.tail_bound))
        if not self.coeffs:
            raise ValueError("a series needs at least the constant coefficient")
        if self.tail_bound < 0 or any(c < 0 for c in self.coeffs):
            raise ValueError("coefficients and tail bound must be nonnegative")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "CertifiedSeries") -> "CertifiedSeries":
        if self.order != other.order:
            raise ValueError("series orders differ")
        return CertifiedSeries(
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
            self.tail_bound + other.tail_bound,
        )

    def scaled(self, factor) -> "CertifiedSeries":
        factor = Fraction(factor)
        if factor < 0:
            raise ValueError("only nonnegative scalings keep the certificate")
        return CertifiedSeries(tuple(c * factor for c in self.coeffs), self.tail_bound * factor)

    def dump(self) -> str:
        """Deterministic JSON form: coefficient strings plus the tail bound."""
        return json.dumps(
            {"coeffs": [fmt_rational(c) for c in self.coeffs], "tail_bound": fmt_rational(self.tail_bound)},
            separators=(",", ":"),
        )

    @classmethod
    def load(cls, text: str) -> "CertifiedSeries":
        data = json.loads(text)
        return cls(tuple(Fraction(c) for c in data["coeffs"]), Fraction(data["tail_bound"]))


def constant(value, M: int) -> CertifiedSeries:
    return CertifiedSeries((Fraction(value),) + (Fraction(0),) * M)


def monomial(power: int, M: int) -> CertifiedSeries:
    """u^power; a power beyond M lives entirely in the tail."""
    if power > M:
        return CertifiedSeries((Fraction(0),) * (M + 1), Fraction(1))
    coeffs = [Fraction(0)] * (M + 1)
    coeffs[power] = Fraction(1)
    return CertifiedSeries(tuple(coeffs))


def zero(M: int) -> CertifiedSeries:
    return CertifiedSeries((Fraction(0),) * (M + 1))


def poly_tn(n: int) -> CertifiedSeries:
    """t_n(u) = u + u^2 + ... + u^n, exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return CertifiedSeries((Fraction(0),) + (Fraction(1),) * n)


def _check_order(n: int, M: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    if M < n + 1:
        raise ValueError(f"truncation order M={M} must be at least n+1={n + 1}")


def _window_tail(window: Sequence[Fraction], n: int, rho: Fraction) -> Fraction:
    """Bound on sum_{j>=1} c_{M+j} for a sequence obeying
    c_{m} <= rho * max(previous n terms) for every m > M.

    Each later term is at most rho^ceil(j/n) * max(window), so the tail is
    at most n * A * rho / (1 - rho).
    """
    A = max(window)
    return n * A * rho / (1 - rho)


def _en_coefficients(n: int, M: int) -> list[Fraction]:
    # (m+1) c_{m+1} = sum_{l=max(m+1-n,0)}^{m} c_l, from f'/f = t_n(u)/u
    c = [Fraction(1)]
    running = Fraction(1)
    for m in range(M):
        c.append(running / (m + 1))
        running += c[-1]
        if m + 1 - n >= 0:
            running -= c[m + 1 - n]
    return c


_memo: dict[tuple, CertifiedSeries] = {}
_memo_lock = threading.Lock()


def _memoized(key, build):
    with _memo_lock:
        hit = _memo.get(key)
    if hit is not None:
        return hit
    value = build()
    with _memo_lock:
        return _memo.setdefault(key, value)


def series_en(n: int, M: int = DEFAULT_ORDER) -> CertifiedSeries:
    """e_n(u) = exp(u + u^2/2 + ... + u^n/n)."""
    _check_order(n, M)
    return _memoized(("en", n, M), lambda: _build_en(n, M))


def _build_en(n: int, M: int) -> CertifiedSeries:
    c = _en_coefficients(n, M)
    partial = sum(c, Fraction(0))
    # all coefficients are positive and sum to e_n(1)
    closed_form = exp_harmonic_bounds(n)[1] - partial
    recurrence = _window_tail(c[M - n + 1:], n, Fraction(n, M + 1))
    tail = min(closed_form, recurrence)
    return CertifiedSeries(tuple(c), round_up(tail))


def series_gn(n: int, M: int = DEFAULT_ORDER) -> CertifiedSeries:
    """g_n, the power series solution of u^2 g'' + 3u g' + g = (1 + t_n) g, g(0) = 1."""
    _check_order(n, M)
    return _memoized(("gn", n, M), lambda: _build_gn(n, M))


def gn_coefficients(n: int, M: int) -> list[Fraction]:
    # a_{m+1} = (sum_{l=max(m+1-n,0)}^{m} a_l) / ((m+1)(m+3))
    a = [Fraction(1)]
    running = Fraction(1)
    for m in range(M):
        a.append(running / ((m + 1) * (m + 3)))
        running += a[-1]
        if m + 1 - n >= 0:
            running -= a[m + 1 - n]
    return a


def gn_coefficient_bound(n: int, m: int) -> Fraction:
    """Upper bound 2/(m(m+2)) * (1/(m+1-n) - 1/(m+1)) on a_m, valid for m > n."""
    return Fraction(2, m * (m + 2)) * (Fraction(1, m + 1 - n) - Fraction(1, m + 1))


def gn_telescoping_tail(n: int, M: int) -> Fraction:
    """Closed-form bound on sum_{m>M} of :func:`gn_coefficient_bound`.

    The summand equals 2n / (m (m+1) (m+2) (m+1-n)) <= 2n/(M+2-n) * 1/(m(m+1)(m+2)),
    and sum_{m>=N} 1/(m(m+1)(m+2)) = 1/(2N(N+1)).
    """
    return Fraction(n, (M + 2 - n) * (M + 1) * (M + 2))


def _build_gn(n: int, M: int) -> CertifiedSeries:
    a = gn_coefficients(n, M)
    telescoping = gn_telescoping_tail(n, M)
    recurrence = _window_tail(a[M - n + 1:], n, Fraction(n, (M + 1) * (M + 3)))
    return CertifiedSeries(tuple(a), round_up(min(telescoping, recurrence)))


def series_delta(n: int, M: int = DEFAULT_ORDER) -> CertifiedSeries:
    """Delta_n(u) = e_n(u) - (1 + t_n(u))."""
    _check_order(n, M)
    return _memoized(("delta", n, M), lambda: _build_delta(n, M))


def _build_delta(n: int, M: int) -> CertifiedSeries:
    en = series_en(n, M)
    coeffs = list(en.coeffs)
    for m in range(n + 1):
        coeffs[m] -= 1
    return CertifiedSeries(tuple(coeffs), en.tail_bound)


def op_mul_one_plus_tn(s: CertifiedSeries, n: int, scale=1) -> CertifiedSeries:
    """(1 + scale * t_n(u)) * s(u), truncated back to order M.

    Overflow coefficients beyond M, and the old tail times 1 + scale*n,
    move into the new tail: on [0, 1] both are dominated by u^(M+1).
    """
    scale = Fraction(scale)
    M = s.order
    c = s.coeffs
    full = [Fraction(0)] * (M + n + 1)
    running = Fraction(0)
    for m in range(M + n + 1):
        if m <= M:
            running += c[m]
        if m - n - 1 >= 0:
            running -= c[m - n - 1]
        # running = sum_{l=max(m-n,0)}^{min(m,M)} c_l
        own = c[m] if m <= M else Fraction(0)
        full[m] = own + scale * (running - own)
    spill = sum(full[M + 1:], Fraction(0))
    tail = s.tail_bound * (1 + scale * n) + spill
    if spill:
        tail = round_up(tail)
    return CertifiedSeries(tuple(full[: M + 1]), tail)


def op_integrate(s: CertifiedSeries) -> CertifiedSeries:
    """u -> int_0^1 s(u x) dx."""
    M = s.order
    return CertifiedSeries(
        tuple(c / (m + 1) for m, c in enumerate(s.coeffs)),
        s.tail_bound / (M + 2),
    )


def eval_at_one(s: CertifiedSeries) -> Enclosure:
    total = sum(s.coeffs, Fraction(0))
    return Enclosure(total, total + s.tail_bound)


def eval_at(s: CertifiedSeries, u) -> Enclosure:
    """Enclosure of s(u) for u in [0, 1]."""
    u = Fraction(u)
    if not (0 <= u <= 1):
        raise ValueError("series are certified on [0, 1] only")
    total = Fraction(0)
    for c in reversed(s.coeffs):
        total = total * u + c
    return Enclosure(total, total + s.tail_bound * u ** (s.order + 1))


class Seed(enum.Enum):
    ONE = "one"
    EN = "en"
    GN = "gn"
    DELTA = "delta"


@dataclass(frozen=True)
class PipelinePlan:
    """Integrand prod_{K in block_ends} [1 + scale * t_n(P_K)] * seed(P_steps)
    over [0,1]^steps, where P_i = x_1 ... x_i.

    ``steps`` defaults to the last block end.  ``seed_power`` multiplies the
    seed by P_steps^seed_power; ``scale`` is the scalar in front of t_n.
    """

    n: int
    block_ends: tuple[int, ...]
    seed: Seed = Seed.ONE
    steps: int | None = None
    scale: Fraction = Fraction(1)
    seed_power: int = 0

    def __post_init__(self):
        ends = tuple(int(k) for k in self.block_ends)
        object.__setattr__(self, "block_ends", ends)
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.steps is None:
            object.__setattr__(self, "steps", ends[-1] if ends else 0)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if any(b <= a for a, b in zip(ends, ends[1:])) or (ends and ends[0] < 1):
            raise ValueError(f"block ends must be positive and strictly increasing: {ends}")
        if ends and ends[-1] > self.steps:
            raise ValueError("block ends exceed the number of integration steps")

    @classmethod
    def for_composition(cls, n: int, parts: Sequence[int], seed: Seed = Seed.ONE,
                        include_last: bool = True) -> "PipelinePlan":
        ends = []
        total = 0
        for p in parts:
            total += p
            ends.append(total)
        factor_ends = ends if include_last else ends[:-1]
        return cls(n, tuple(factor_ends), seed, steps=total)


def seed_series(plan: PipelinePlan, M: int) -> CertifiedSeries:
    if plan.seed is Seed.ONE:
        base = constant(1, M)
    elif plan.seed is Seed.EN:
        base = series_en(plan.n, M)
    elif plan.seed is Seed.GN:
        base = series_gn(plan.n, M)
    else:
        base = series_delta(plan.n, M)
    if plan.seed_power:
        base = shift(base, plan.seed_power)
    return base


def shift(s: CertifiedSeries, power: int) -> CertifiedSeries:
    """u^power * s(u)."""
    M = s.order
    coeffs = (Fraction(0),) * power + s.coeffs
    spill = sum(coeffs[M + 1:], Fraction(0))
    return CertifiedSeries(coeffs[: M + 1], s.tail_bound + spill)


def run_series(plan: PipelinePlan, M: int = DEFAULT_ORDER) -> CertifiedSeries:
    """Apply the plan from the innermost variable outwards; returns the series
    in the outer scaling variable u (the plan's integral is its value at 1)."""
    if M < plan.n + 1:
        raise ValueError(f"truncation order M={M} must be at least n+1={plan.n + 1}")
    s = seed_series(plan, M)
    ends = set(plan.block_ends)
    for i in range(plan.steps, 0, -1):
        if i in ends:
            s = op_mul_one_plus_tn(s, plan.n, plan.scale)
        s = op_integrate(s)
    return s


def run_pipeline(plan: PipelinePlan, M: int = DEFAULT_ORDER) -> Enclosure:
    return eval_at_one(run_series(plan, M))
