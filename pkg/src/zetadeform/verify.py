"""Batch checks of the identities, inequalities and dimension formulas.

Each suite returns a list of VerificationReport.  A check is inconclusive
only when enclosures overlap the boundary they must clear.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import series as ser
from .compositions import Tail, TailSpec, compositions_upto, lex_compare, tau
from .deform_map import (
    DEFAULT_DEPTH,
    Gn_value,
    Hn_gap,
    JumpSite,
    bilipschitz_ratio,
    default_weight_cutoff,
    eta_tail,
    fn_enclosure,
    fn_preimage,
    hn_bounds,
    hn_value,
    jump_partial_sums,
    jump_mass_bound,
    sample_points,
    tail_specs_upto,
)
from .enclosure import Enclosure
from .exact_deform import tn_bruteforce, tn_exact
from .fractal import (
    E2_FAMILY,
    box_count_dim,
    cantor_family,
    cantor_points,
    e2_points,
    hn_image_sample,
    moran_solve,
)
from .numerics import exp_bounds, exp_harmonic_bounds, fmt_rational, harmonic
from .series import DEFAULT_ORDER


class Status(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class VerificationReport:
    check: str
    status: Status
    witness: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def line(self) -> str:
        extra = " ".join(f"{k}={v}" for k, v in self.witness.items())
        return f"{self.status.value.upper():12s} {self.check}" + (f"  {extra}" if extra else "")

    def to_json(self) -> dict:
        return {"check": self.check, "status": self.status.value,
                "witness": self.witness, "tolerances": self.tolerances}


def _strict(lower: Enclosure, upper: Enclosure) -> Status:
    """Status of the claim lower < upper."""
    if lower.hi < upper.lo:
        return Status.PASS
    if lower.lo >= upper.hi:
        return Status.FAIL
    return Status.INCONCLUSIVE


def _worst(statuses) -> Status:
    statuses = list(statuses)
    if Status.FAIL in statuses:
        return Status.FAIL
    if Status.INCONCLUSIVE in statuses:
        return Status.INCONCLUSIVE
    return Status.PASS


def _f(q) -> str:
    return f"{float(q):.10g}"


def suite_oracle(max_weight: int = 8, max_part: int = 4, levels=(1, 2, 3)) -> list[VerificationReport]:
    """tn_exact against brute-force expansion."""
    checked = 0
    mismatches = []
    for n in levels:
        for parts in compositions_upto(max_weight, max_part=max_part):
            checked += 1
            if tn_exact(n, parts) != tn_bruteforce(n, parts):
                mismatches.append((n, parts))
    status = Status.FAIL if mismatches else Status.PASS
    witness = {"checked": checked, "mismatches": len(mismatches)}
    if mismatches:
        witness["first"] = str(mismatches[0])
    return [VerificationReport("tn-oracle", status, witness, {"equality": "exact"})]


def suite_closed_form(levels=(1, 2, 3), M: int = DEFAULT_ORDER, width=Fraction(1, 10**8)) -> list[VerificationReport]:
    """eta_n(1, 1, ...) = e^(1 + 1/2 + ... + 1/n)."""
    out = []
    for n in levels:
        enc = eta_tail(n, TailSpec((), Tail.ONES), M)
        oracle = Enclosure(*exp_bounds(harmonic(n), Fraction(1, 10**120)))
        ok = enc.contains(oracle) and enc.width < width
        out.append(VerificationReport(f"eta-all-ones n={n}", Status.PASS if ok else Status.FAIL,
                                      {"enclosure": enc.describe(12)}, {"width": fmt_rational(width)}))
    return out


def suite_gn(levels=(1, 2, 3, 4), top: int = 50) -> list[VerificationReport]:
    """Coefficient identities and bounds of the all-twos tail function."""
    out = []
    for n in levels:
        a = ser.gn_coefficients(n, top)
        bad = []
        for m in range(top + 1):
            formula = Fraction(2, (m + 1) * (m + 2))
            if m <= n and a[m] != formula:
                bad.append(f"a_{m} != 2/((m+1)(m+2))")
            if m > n and not (0 < a[m] < formula and a[m] <= ser.gn_coefficient_bound(n, m)):
                bad.append(f"a_{m} bound")
            if m >= 1 and (m + 1) ** 2 * a[m] != sum(a[max(m - n, 0): m + 1]):
                bad.append(f"ode at m={m}")
        out.append(VerificationReport(f"gn-coefficients n={n}", Status.FAIL if bad else Status.PASS,
                                      {"violations": len(bad)} | ({"first": bad[0]} if bad else {}),
                                      {"orders": f"0..{top}"}))
    return out


def suite_fixed_point(levels=(1, 2, 3, 4), M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    out = []
    for n in levels:
        en = ser.series_en(n, M)
        image = ser.op_integrate(ser.op_mul_one_plus_tn(en, n))
        ok = image.coeffs == en.coeffs
        out.append(VerificationReport(f"en-fixed-point n={n}", Status.PASS if ok else Status.FAIL,
                                      {"order": M}, {"equality": "exact"}))
    return out


def suite_order_t2(levels=(1, 2), max_weight: int = 8, M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    """eta_n is strictly increasing along the order on all-parts->=2 sequences."""
    specs = tail_specs_upto(max_weight, min_part=2, tails=(Tail.TWOS,))
    out = []
    for n in levels:
        values = {t: eta_tail(n, t, M) for t in specs}
        statuses = []
        worst = None
        for k, l in itertools.combinations(specs, 2):
            if lex_compare(k, l) < 0:
                k, l = l, k
            status = _strict(values[l], values[k])
            statuses.append(status)
            if status is not Status.PASS and worst is None:
                worst = f"{k} vs {l}"
        witness = {"pairs": len(statuses), "violations": sum(s is Status.FAIL for s in statuses),
                   "unresolved": sum(s is Status.INCONCLUSIVE for s in statuses)}
        if worst:
            witness["first"] = worst
        out.append(VerificationReport(f"order-t2 n={n}", _worst(statuses), witness,
                                      {"prefix_weight": max_weight}))
    return out


def suite_delta_sandwich(levels=(1, 2, 3), M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    """n u^(n+1)/(n+1) < Delta_n(u) < 2n u^(n+1) on u = 1/10, ..., 9/10."""
    out = []
    for n in levels:
        delta = ser.series_delta(n, M)
        statuses = []
        for i in range(1, 10):
            u = Fraction(i, 10)
            value = ser.eval_at(delta, u)
            lower = Enclosure.point(Fraction(n, n + 1) * u ** (n + 1))
            upper = Enclosure.point(2 * n * u ** (n + 1))
            statuses += [_strict(lower, value), _strict(value, upper)]
        out.append(VerificationReport(f"delta-sandwich n={n}", _worst(statuses),
                                      {"grid": "1/10..9/10"}, {"strict": True}))
    return out


def suite_jump_sandwich(levels=(1,), max_weight: int = 8, M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    """(n/(n+1))/(n+2)^K <= h_n(site) <= 2n e^((n+2)n)/(n+2)^K."""
    out = []
    for n in levels:
        statuses = []
        first = None
        for parts in compositions_upto(max_weight):
            site = JumpSite.of(parts)
            value = hn_value(n, site, M)
            lo, hi = hn_bounds(n, site.weight)
            pair = [_strict(Enclosure.point(lo), value), _strict(value, Enclosure.point(hi))]
            statuses += pair
            if first is None and _worst(pair) is not Status.PASS:
                first = str(site.composition)
        witness = {"sites": len(statuses) // 2}
        if first:
            witness["first"] = first
        out.append(VerificationReport(f"hn-sandwich n={n}", _worst(statuses), witness,
                                      {"max_weight": max_weight}))
    return out


def product_integral_plan(r: int, m: int, u: Fraction) -> ser.PipelinePlan:
    """int over [0,1]^(r-1) of prod_i [1 + u x_1...x_i] (x_1...x_(r-1))^m."""
    return ser.PipelinePlan(1, tuple(range(1, r)), ser.Seed.ONE, steps=r - 1, scale=u, seed_power=m)


def suite_product_bound(rs=(2, 3, 4), ms=(0, 1, 2), us=(Fraction(1, 2), Fraction(1), Fraction(2)),
                    M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    statuses = []
    first = None
    for r, m, u in itertools.product(rs, ms, us):
        value = ser.run_pipeline(product_integral_plan(r, m, u), M)
        lo, hi = exp_bounds((m + 1) * u)
        bound = Enclosure(lo, hi).scale(Fraction(1, (m + 1) ** (r - 1)))
        status = _strict(value, bound)
        statuses.append(status)
        if first is None and status is not Status.PASS:
            first = f"r={r} m={m} u={u}"
    witness = {"cases": len(statuses)}
    if first:
        witness["first"] = first
    return [VerificationReport("product-integral-bound", _worst(statuses), witness, {"strict": True})]


def suite_jump_mass(levels=(1,), W: int = 14, M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    out = []
    for n in levels:
        sums = jump_partial_sums(n, W, M)
        bound = Enclosure.point(jump_mass_bound(n))
        # the bound is rounded up, so compare against the exact lower end
        bound_lo = 2 * exp_bounds((n + 2) * n)[0]
        status = _worst(_strict(s, Enclosure.point(bound_lo)) for s in sums)
        out.append(VerificationReport(f"jump-mass n={n}", status,
                                      {"partial_sum": _f(sums[-1].hi), "bound": _f(bound.lo)},
                                      {"weight": W}))
    return out


def suite_range(levels=(1, 2, 3), max_weight: int = 4, M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    """eta_n(t) < e^(1 + ... + 1/n) for every t other than all ones."""
    specs = [t for t in tail_specs_upto(max_weight) if t != TailSpec((), Tail.ONES)]
    out = []
    for n in levels:
        top = Enclosure(*exp_harmonic_bounds(n))
        status = _worst(_strict(eta_tail(n, t, M), top) for t in specs)
        out.append(VerificationReport(f"strict-range n={n}", status, {"sequences": len(specs)}, {}))
    return out


def suite_pipeline(max_weight: int = 6, levels=(1, 2, 3), M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    bad = []
    count = 0
    for n in levels:
        for parts in compositions_upto(max_weight):
            count += 1
            plan = ser.PipelinePlan.for_composition(n, parts)
            if not ser.run_pipeline(plan, M).contains(tn_exact(n, parts)):
                bad.append((n, parts))
    witness = {"cases": count} | ({"first": str(bad[0])} if bad else {})
    return [VerificationReport("pipeline-vs-exact", Status.FAIL if bad else Status.PASS, witness, {})]


def suite_consistency(levels=(1, 2), max_weight: int = 4, M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    """fn_enclosure at tau(t) meets eta_tail(t)."""
    out = []
    for n in levels:
        bad = [t for t in tail_specs_upto(max_weight)
               if not fn_enclosure(n, tau(t), DEFAULT_DEPTH, M).intersects(eta_tail(n, t, M))]
        out.append(VerificationReport(f"fn-eta-consistency n={n}", Status.FAIL if bad else Status.PASS,
                                      {"first": str(bad[0])} if bad else {}, {}))
    return out


def suite_decomposition(n: int = 1, count: int = 200, depth: int = DEFAULT_DEPTH, W: int | None = None,
                        M: int = DEFAULT_ORDER, strict_share: float = 0.95,
                        jump_tol=Fraction(1, 1000)) -> list[VerificationReport]:
    """G_n monotone on sample points; the jump of H_n at 1/2 is h_n(1/2)."""
    if W is None:
        W = default_weight_cutoff(n)
    xs = sample_points(count)
    values = [Gn_value(n, x, depth, W, M) for x in xs]
    decreasing = 0
    separated = 0
    for a, b in zip(values, values[1:]):
        if a.lo > b.hi:
            decreasing += 1
        if a.hi < b.lo:
            separated += 1
    pairs = len(values) - 1
    share = separated / pairs
    status = Status.PASS if decreasing == 0 and share >= strict_share else Status.FAIL
    reports = [VerificationReport(f"gn-monotone n={n}", status,
                                  {"points": len(xs), "separated": f"{separated}/{pairs}", "decreasing": decreasing},
                                  {"strict_share": strict_share})]
    half = Fraction(1, 2)
    detected = Hn_gap(n, half, half + Fraction(1, 1 << 20), W, M)
    expected = hn_value(n, JumpSite.at(half), M)
    error = max(abs(detected.hi - expected.lo), abs(expected.hi - detected.lo))
    ok = error <= jump_tol
    reports.append(VerificationReport(f"hn-jump-at-half n={n}", Status.PASS if ok else Status.FAIL,
                                      {"detected": detected.describe(8), "h": expected.describe(8), "error": _f(error)},
                                      {"tolerance": fmt_rational(jump_tol)}))
    return reports


def suite_moran(residual_tol: float = 1e-12, golden_tol: float = 1e-9,
                levels=(1, 2, 3)) -> list[VerificationReport]:
    import mpmath

    out = []
    with mpmath.workdps(50):
        s = moran_solve(E2_FAMILY, Fraction(1, 10**15))
        mid = mpmath.mpf(s.mid.numerator) / s.mid.denominator
        two_s = mpmath.power(2, mid)
        residual = abs(two_s**2 - two_s - 1)
        golden = mpmath.log((1 + mpmath.sqrt(5)) / 2) / mpmath.log(2)
        gap = abs(mid - golden)
        ok = residual < residual_tol and gap < golden_tol
        out.append(VerificationReport("moran-e2", Status.PASS if ok else Status.FAIL,
                                      {"s": mpmath.nstr(mid, 12), "residual": mpmath.nstr(residual, 3)},
                                      {"residual": residual_tol, "golden": golden_tol}))
        for n in levels:
            enc = moran_solve(cantor_family(n + 2), Fraction(1, 10**15))
            target = mpmath.log(2) / mpmath.log(n + 2)
            m = mpmath.mpf(enc.mid.numerator) / enc.mid.denominator
            ok = abs(m - target) < golden_tol
            out.append(VerificationReport(f"moran-cantor m={n + 2}", Status.PASS if ok else Status.FAIL,
                                          {"s": mpmath.nstr(m, 12)}, {"tolerance": golden_tol}))
    return out


def suite_box_count(tol: float = 0.05) -> list[VerificationReport]:
    out = []
    cantor = box_count_dim(cantor_points(3, 12), [Fraction(1, 3**k) for k in range(4, 11)])
    target = math.log(2) / math.log(3)
    out.append(VerificationReport("box-count cantor-1/3", Status.PASS if abs(cantor.value - target) < tol else Status.FAIL,
                                  {"estimate": f"{cantor.value:.6f}", "target": f"{target:.6f}"}, {"tolerance": tol}))
    e2 = box_count_dim(e2_points(20), [Fraction(1, 2**k) for k in range(6, 15)])
    target = math.log((1 + math.sqrt(5)) / 2) / math.log(2)
    out.append(VerificationReport("box-count e2", Status.PASS if abs(e2.value - target) < tol else Status.FAIL,
                                  {"estimate": f"{e2.value:.6f}", "target": f"{target:.6f}"}, {"tolerance": tol}))
    return out


def t2_pairs(count: int, max_weight: int = 12, max_part: int = 8, seed: int = 0) -> list[tuple[TailSpec, TailSpec]]:
    """Deterministic sample of ordered pairs (k > l) of all-parts->=2 sequences."""
    specs = sorted({TailSpec(p, Tail.TWOS).canonical()
                    for p in compositions_upto(max_weight, min_part=2, max_part=max_part, include_empty=True)},
                   key=lambda t: (t.prefix.weight, t.prefix.parts))
    rng = random.Random(seed)
    pairs = []
    seen = set()
    while len(pairs) < count:
        k, l = rng.sample(specs, 2)
        if lex_compare(k, l) < 0:
            k, l = l, k
        if (k, l) in seen:
            continue
        seen.add((k, l))
        pairs.append((k, l))
    return pairs


def suite_bilipschitz(n: int = 1, count: int = 100, M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    statuses = []
    lo = hi = None
    first = None
    for k, l in t2_pairs(count):
        ratio, (c1, c2) = bilipschitz_ratio(n, k, l, M)
        status = _worst([_strict(c1, ratio), _strict(ratio, c2)])
        statuses.append(status)
        lo = ratio.lo if lo is None else min(lo, ratio.lo)
        hi = ratio.hi if hi is None else max(hi, ratio.hi)
        if first is None and status is not Status.PASS:
            first = f"{k} vs {l}"
    witness = {"pairs": len(statuses), "min": _f(lo), "max": _f(hi)} | ({"first": first} if first else {})
    return [VerificationReport(f"bilipschitz n={n}", _worst(statuses), witness,
                               {"c1": _f(c1.lo), "c2": _f(c2.lo)})]


def suite_distortion(levels=(1,), max_weight: int = 3) -> list[VerificationReport]:
    out = []
    for n in levels:
        rep = hn_image_sample(n, max_weight=max_weight)
        ok = 0 < rep.min_ratio and rep.normalized_lo >= rep.lower_bound and rep.normalized_hi <= rep.upper_bound
        out.append(VerificationReport(f"hn-distortion n={n}", Status.PASS if ok else Status.FAIL,
                                      {"pairs": len(rep.samples), "min_ratio": _f(rep.min_ratio),
                                       "max_ratio": _f(rep.max_ratio), "normalized": f"[{_f(rep.normalized_lo)}, {_f(rep.normalized_hi)}]"},
                                      {"lower": _f(rep.lower_bound), "upper": _f(rep.upper_bound)}))
    return out


def preimage_targets(count: int = 10, n: int = 1) -> list[Fraction]:
    """Evenly spaced rationals in (1.1, 0.95 e^(1 + ... + 1/n))."""
    top = Fraction(95, 100) * exp_harmonic_bounds(n)[0]
    lo = Fraction(11, 10)
    step = (top - lo) / (count + 1)
    return [round_to(lo + step * (i + 1), 6) for i in range(count)]


def round_to(q: Fraction, digits: int) -> Fraction:
    return Fraction(round(q * 10**digits), 10**digits)


def suite_preimage(n: int = 1, count: int = 10, tol=Fraction(1, 10**4), depth: int = DEFAULT_DEPTH,
                   M: int = DEFAULT_ORDER) -> list[VerificationReport]:
    statuses = []
    worst = Fraction(0)
    for y0 in preimage_targets(count, n):
        res = fn_preimage(n, y0, Fraction(1, 1 << 40), M)
        x = res.interval.lo
        value = fn_enclosure(n, x, depth, M)
        error = max(abs(value.hi - y0), abs(y0 - value.lo))
        worst = max(worst, error)
        statuses.append(Status.PASS if error <= tol else Status.FAIL)
    return [VerificationReport(f"preimage n={n}", _worst(statuses), {"targets": count, "worst": _f(worst)},
                               {"tolerance": fmt_rational(tol)})]


SUITES: dict[str, Callable[..., list[VerificationReport]]] = {
    "oracle": suite_oracle,
    "closed-form": suite_closed_form,
    "gn": suite_gn,
    "fixed-point": suite_fixed_point,
    "order-t2": suite_order_t2,
    "lemma-exp": suite_delta_sandwich,
    "lemma-del": suite_jump_sandwich,
    "lemma-leq": suite_product_bound,
    "jump-mass": suite_jump_mass,
    "range": suite_range,
    "pipeline": suite_pipeline,
    "consistency": suite_consistency,
    "decomposition": suite_decomposition,
    "moran": suite_moran,
    "box-count": suite_box_count,
    "bilipschitz": suite_bilipschitz,
    "distortion": suite_distortion,
    "preimage": suite_preimage,
}
