from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from zetadeform.compositions import (
    Composition,
    Membership,
    Tail,
    TailSpec,
    binary_digits,
    classify,
    compositions_of,
    compositions_upto,
    first_difference,
    lex_compare,
    ones,
    tail_spec_of,
    tau,
    tau_inverse,
    twos,
)

prefixes = st.lists(st.integers(1, 6), max_size=6).map(tuple)
specs = st.builds(TailSpec, prefixes, st.sampled_from([Tail.ONES, Tail.TWOS]))


def test_composition_basics():
    c = Composition.parse("2,1,3")
    assert c.weight == 6 and c.depth == 3
    assert c.prefix_sums() == (2, 3, 6)
    assert c.text() == "2,1,3"
    assert Composition.parse("") == Composition(())
    with pytest.raises(ValueError):
        Composition((2, 0))


def test_tail_spec_text_round_trip():
    for text in ("2,1+1*", "+2*", "3,3+2*"):
        assert TailSpec.parse(text).text() == text
    with pytest.raises(ValueError):
        TailSpec.parse("2,1")


def test_canonical_drops_repeated_tail_entries():
    assert ones((2, 1, 1)).canonical() == ones((2,))
    assert twos((3, 2, 2)).canonical() == twos((3,))


def test_tau_known_points():
    assert tau(ones()) == 1
    assert tau(twos()) == Fraction(1, 3)
    assert tau(ones((2,))) == Fraction(1, 2)
    assert tau(ones((3,))) == Fraction(1, 4)


def test_binary_digits_use_nonterminating_expansion():
    assert binary_digits(Fraction(1, 2), 4) == [0, 1, 1, 1]
    assert binary_digits(1, 3) == [1, 1, 1]


def test_tau_inverse_examples():
    assert tau_inverse(1, 3).parts == (1, 1, 1)
    assert tau_inverse(Fraction(1, 3), 4).parts == (2, 2, 2, 2)
    assert tau_inverse(Fraction(1, 2), 3).parts == (2, 1, 1)
    with pytest.raises(ValueError):
        tau_inverse(0, 3)
    with pytest.raises(ValueError):
        tau_inverse(Fraction(3, 2), 3)


@given(specs)
def test_tail_spec_of_inverts_tau(t):
    assert tail_spec_of(tau(t)) == t.canonical()


@given(specs)
def test_tau_inverse_reads_back_the_sequence(t):
    depth = len(t.prefix) + 3
    assert tau_inverse(tau(t), depth).parts == t.head(depth)


@given(specs, specs)
def test_order_matches_tau(k, l):
    order = lex_compare(k, l)
    assert order == -lex_compare(l, k)
    if order > 0:
        assert tau(k) > tau(l)
    elif order == 0:
        assert tau(k) == tau(l)


def test_tail_spec_of_rejects_other_rationals():
    assert tail_spec_of(Fraction(1, 5)) is None
    assert tail_spec_of(Fraction(2, 7)) is None


def test_classify():
    assert Membership.IN_T2 in classify(twos((3, 2)))
    assert Membership.IN_T2 not in classify(twos((1,)))
    assert Membership.IN_TR in classify(ones((2,)))
    assert Membership.IN_TR not in classify(ones())


def test_composition_enumeration_counts():
    assert sum(1 for _ in compositions_of(5)) == 16
    assert list(compositions_of(4, min_part=2)) == [(2, 2), (4,)]
    assert sum(1 for _ in compositions_upto(8)) == 255
    assert next(iter(compositions_upto(3, include_empty=True))) == ()


def test_first_difference():
    assert first_difference(ones((2, 3)), ones((2, 4))) == 2
    assert first_difference(ones((2,)), ones((2, 1))) is None
