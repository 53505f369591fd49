import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zetadeform import series as ser
from zetadeform.compositions import compositions_upto
from zetadeform.exact_deform import tn_exact
from zetadeform.series import CertifiedSeries, PipelinePlan, Seed


def test_poly_tn():
    assert ser.poly_tn(1).coeffs == (0, 1)
    assert ser.poly_tn(3).coeffs == (0, 1, 1, 1)
    assert sum(ser.poly_tn(5).coeffs) == 5
    with pytest.raises(ValueError):
        ser.poly_tn(0)


def test_en_factorials_for_level_one():
    s = ser.series_en(1, 30)
    assert all(c == Fraction(1, math.factorial(m)) for m, c in enumerate(s.coeffs))


def test_en_recurrence():
    for n in range(1, 5):
        c = ser.series_en(n, 40).coeffs
        assert c[0] == 1
        for m in range(40):
            assert (m + 1) * c[m + 1] == sum(c[max(m + 1 - n, 0): m + 1])


def test_en_encloses_e():
    enc = ser.eval_at_one(ser.series_en(1, 20))
    assert Fraction(2718281828459045, 10**15) < enc.lo <= enc.hi < Fraction(2718281828459046, 10**15)
    assert enc.width < Fraction(1, 10**15)


def test_gn_first_coefficients():
    assert ser.gn_coefficients(1, 4) == [1, Fraction(1, 3), Fraction(1, 24), Fraction(1, 360), Fraction(1, 8640)]
    assert ser.gn_coefficients(2, 2)[2] == Fraction(1, 6)


def test_gn_value_against_recurrence_sum():
    # independent partial sum of the recurrence with a crude geometric tail
    a, total = Fraction(1), Fraction(1)
    terms = [a]
    for m in range(25):
        a = terms[-1] / ((m + 1) * (m + 3))
        terms.append(a)
        total += a
    enc = ser.eval_at_one(ser.series_gn(1, 40))
    assert enc.lo <= total + terms[-1] and total <= enc.hi
    assert abs(float(enc.mid) - 1.3778969) < 1e-7


def test_gn_tail_covers_omitted_coefficients():
    for n in (1, 2, 3):
        short = ser.series_gn(n, 20)
        long = ser.gn_coefficients(n, 80)
        assert sum(long[21:]) <= short.tail_bound


def test_en_tail_covers_omitted_coefficients():
    for n in (1, 2, 3):
        short = ser.series_en(n, 20)
        long = ser.series_en(n, 120).coeffs
        assert sum(long[21:]) <= short.tail_bound


def test_delta_coefficients():
    for n in (1, 2, 3):
        d = ser.series_delta(n, 20)
        assert all(c == 0 for c in d.coeffs[: n + 1])
        assert d.coeffs[n + 1] == Fraction(n, n + 1)
    d = ser.series_delta(1, 10)
    assert d.coeffs[2:4] == (Fraction(1, 2), Fraction(1, 6))


def test_order_guard():
    with pytest.raises(ValueError):
        ser.series_en(3, 3)


def test_operator_examples():
    one = ser.constant(1, 2)
    assert ser.op_mul_one_plus_tn(one, 1) == CertifiedSeries((1, 1, 0), 0)
    assert ser.op_integrate(CertifiedSeries((1, 1), 0)).coeffs == (1, Fraction(1, 2))
    assert ser.op_integrate(ser.constant(1, 5)).coeffs == ser.constant(1, 5).coeffs
    assert ser.eval_at_one(CertifiedSeries((1, Fraction(1, 2)))).lo == Fraction(3, 2)


def test_spill_moves_into_tail():
    s = CertifiedSeries((0, 0, 1), Fraction(1, 10))
    out = ser.op_mul_one_plus_tn(s, 2)
    assert out.coeffs == (0, 0, 1)
    assert out.tail_bound >= 2 + Fraction(3, 10)


def test_fixed_point_identity():
    for n in range(1, 5):
        en = ser.series_en(n, 60)
        assert ser.op_integrate(ser.op_mul_one_plus_tn(en, n)).coeffs == en.coeffs


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=3), min_size=3, max_size=8),
       st.fractions(min_value=0, max_value=1), st.integers(1, 3),
       st.fractions(min_value=0, max_value=1))
def test_operators_keep_certificate(coeffs, tail, n, u):
    # an exact polynomial of degree M + n + 1 stands in for the true function
    full = coeffs + [tail]
    s = CertifiedSeries(tuple(coeffs), tail)
    out = ser.op_integrate(ser.op_mul_one_plus_tn(s, n))
    product = [Fraction(0)] * (len(full) + n)
    for i, c in enumerate(full):
        product[i] += c
        for j in range(1, n + 1):
            product[i + j] += c
    truth = sum(c / (m + 1) * u**m for m, c in enumerate(product))
    enc = ser.eval_at(out, u)
    assert enc.lo <= truth <= enc.hi
    assert all(c >= 0 for c in out.coeffs) and out.tail_bound >= 0


def test_pipeline_examples():
    assert ser.run_pipeline(PipelinePlan(1, (2,))).contains(Fraction(5, 4))
    delta = ser.run_pipeline(PipelinePlan(1, (), Seed.DELTA, steps=1))
    assert abs(float(delta.mid) - (math.e - 2.5)) < 1e-12
    e = ser.run_pipeline(PipelinePlan(1, (), Seed.EN))
    assert abs(float(e.mid) - math.e) < 1e-15


def test_pipeline_matches_exact_values():
    for n in (1, 2, 3):
        for parts in compositions_upto(6):
            enc = ser.run_pipeline(PipelinePlan.for_composition(n, parts))
            assert enc.contains(tn_exact(n, parts))


def test_plan_validation():
    with pytest.raises(ValueError):
        PipelinePlan(1, (2, 2))
    with pytest.raises(ValueError):
        PipelinePlan(1, (3,), steps=2)
    with pytest.raises(ValueError):
        PipelinePlan(0, (1,))


def test_scaled_plan_against_quadrature_expansion():
    # int_0^1 int_0^1 (1 + u x)(1 + u x y) (x y)^m dx dy, expanded by hand
    for m in (0, 1, 2):
        for u in (Fraction(1, 2), Fraction(2)):
            expected = (Fraction(1, (m + 1) ** 2) + u / ((m + 2) * (m + 1)) + u / (m + 2) ** 2
                        + u * u / ((m + 3) * (m + 2)))
            plan = PipelinePlan(1, (1, 2), Seed.ONE, steps=2, scale=u, seed_power=m)
            assert ser.run_pipeline(plan).contains(expected)


def test_dump_round_trip():
    s = ser.series_gn(2, 10)
    assert CertifiedSeries.load(s.dump()) == s
    assert s.dump() == ser.series_gn(2, 10).dump()
