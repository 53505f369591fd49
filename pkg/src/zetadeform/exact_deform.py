"""Exact evaluation of the rational deformations T_n(k_1, ..., k_r).

Expanding every factor ``1 + P + ... + P^n`` (P a partial product of the
integration variables) and integrating monomial by monomial gives

    T_n(k) = sum over b_1 >= b_2 >= ... >= b_r >= 1 with
             b_j - b_{j+1} <= n and b_r <= n + 1  of  prod_j b_j^(-k_j),

where b_j - 1 is the total exponent carried by the j-th block of
variables.  :func:`tn_exact` evaluates this chain sum right to left with
prefix sums; :func:`tn_bruteforce` expands the integrand literally.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .compositions import Composition, as_composition

BRUTEFORCE_LIMIT = 10**7


@dataclass(frozen=True)
class DeformKey:
    n: int
    composition: Composition

    def __post_init__(self):
        object.__setattr__(self, "composition", as_composition(self.composition))
        if self.n < 1:
            raise ValueError(f"deformation level must be >= 1, got {self.n}")


def _key(n_or_key, composition=None) -> DeformKey:
    if isinstance(n_or_key, DeformKey):
        return n_or_key
    return DeformKey(n_or_key, as_composition(composition))


def tn_exact(n_or_key, composition=None) -> Fraction:
    """T_n(k) as an exact rational.

    Accepts either a DeformKey or ``(n, composition)``.
    """
    key = _key(n_or_key, composition)
    n, parts = key.n, key.composition.parts
    if not parts:
        raise ValueError("T_n is not defined for the empty composition")
    # layer[b] for b = 1..1+j*n, stored as integers over a shared denominator
    top = n + 1
    den = 1
    for b in range(1, top + 1):
        den = lcm(den, b ** parts[-1])
    layer = [0] + [den // b ** parts[-1] for b in range(1, top + 1)]
    for k in reversed(parts[:-1]):
        new_top = top + n
        prefix = [0] * (top + 1)
        acc = 0
        for b in range(1, top + 1):
            acc += layer[b]
            prefix[b] = acc
        scale = 1
        for b in range(1, new_top + 1):
            scale = lcm(scale, b ** k)
        new_layer = [0] * (new_top + 1)
        for b in range(1, new_top + 1):
            window = prefix[min(b, top)] - prefix[max(b - n - 1, 0)]
            new_layer[b] = window * (scale // b ** k)
        layer, top, den = new_layer, new_top, den * scale
    return Fraction(sum(layer), den)


def tn_bruteforce(n_or_key, composition=None) -> Fraction:
    """Sum over (a_1..a_r) in {0..n}^r of prod_j (1 + a_j + ... + a_r)^(-k_j).

    The empty composition gives 1 (empty product).
    """
    key = _key(n_or_key, composition)
    n, parts = key.n, key.composition.parts
    r = len(parts)
    if (n + 1) ** r > BRUTEFORCE_LIMIT:
        raise ValueError(f"brute force needs (n+1)^r = {(n + 1) ** r} > {BRUTEFORCE_LIMIT} terms")
    counts: Counter[int] = Counter()
    for exps in itertools.product(range(n + 1), repeat=r):
        denom = 1
        tail = 1
        for a, k in zip(reversed(exps), reversed(parts)):
            tail += a
            denom *= tail**k
        counts[denom] += 1
    return sum((Fraction(c, d) for d, c in counts.items()), Fraction(0))


def tn_monotone_table(n: int, base, extension_part: int, steps: int) -> list[Fraction]:
    """T_n(base), T_n(base + (c,)), T_n(base + (c, c)), ... (`steps` values)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    base = as_composition(base)
    return [tn_exact(n, base + (extension_part,) * i) for i in range(steps)]


def tn_depth_one(n: int, k: int) -> Fraction:
    """Closed form T_n(k) = sum_{a=0}^{n} (a+1)^-k."""
    return sum((Fraction(1, (a + 1) ** k) for a in range(n + 1)), Fraction(0))
