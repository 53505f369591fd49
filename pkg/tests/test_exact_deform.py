from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zetadeform.exact_deform import DeformKey, tn_bruteforce, tn_depth_one, tn_exact, tn_monotone_table


@pytest.mark.parametrize("n, k, value", [
    (1, (2,), Fraction(5, 4)),
    (2, (2,), Fraction(49, 36)),
    (1, (1, 1), Fraction(23, 12)),
    (1, (2, 1), Fraction(103, 72)),
    (1, (1, 1, 1), Fraction(20, 9)),
])
def test_known_values(n, k, value):
    assert tn_exact(n, k) == value
    assert tn_bruteforce(n, k) == value


def test_key_form():
    assert tn_exact(DeformKey(1, (2,))) == Fraction(5, 4)
    with pytest.raises(ValueError):
        DeformKey(0, (2,))


def test_empty_composition():
    assert tn_bruteforce(1, ()) == 1
    with pytest.raises(ValueError):
        tn_exact(1, ())


def test_bruteforce_guard():
    with pytest.raises(ValueError):
        tn_bruteforce(3, (1,) * 20)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.lists(st.integers(1, 4), min_size=1, max_size=5))
def test_dp_matches_expansion(n, parts):
    assert tn_exact(n, parts) == tn_bruteforce(n, parts)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.lists(st.integers(1, 4), min_size=1, max_size=5))
def test_increasing_in_level(n, parts):
    assert tn_exact(n, parts) < tn_exact(n + 1, parts)


def test_depth_one_closed_form():
    for n in (1, 2, 5):
        for k in (1, 2, 3):
            assert tn_exact(n, (k,)) == tn_depth_one(n, k)


def test_all_ones_approach_the_exponential():
    table = tn_monotone_table(1, (1,), 1, 25)
    assert all(a < b for a, b in zip(table, table[1:]))
    assert Fraction(2718281, 10**6) < table[-1] < Fraction(2718282, 10**6)
