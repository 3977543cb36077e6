from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from knotspec.polynomial import LOOP, LaurentPolynomial as P

polys = st.dictionaries(st.integers(-30, 30), st.integers(-50, 50), max_size=6).map(P)


def test_zero_coefficients_are_dropped():
    p = P({3: 0, -1: 2, 2: 1}) + P({2: -1})
    assert p.terms == {-1: 2}
    assert P({1: 0}).is_zero()


def test_non_integer_coefficients_rejected():
    with pytest.raises(TypeError):
        P({0: 1.5})


def test_loop_value_and_powers():
    assert LOOP == P({2: -1, -2: -1})
    assert LOOP ** 2 == P({4: 1, 0: 2, -4: 1})
    assert P({3: -1}) ** -2 == P({-6: 1})
    assert P({3: -1}) ** -1 == P({-3: -1})
    with pytest.raises(ValueError):
        LOOP ** -1


def test_string_form_is_descending():
    p = P({-16: -1, -4: 1, -12: 1})
    assert str(p) == "1*A^-4 + 1*A^-12 + -1*A^-16"
    assert str(P()) == "0"


def test_to_t_for_trefoil():
    p = P({-4: 1, -12: 1, -16: -1})
    assert p.to_t() == {Fraction(1): 1, Fraction(3): 1, Fraction(4): -1}


@given(polys)
def test_parse_round_trip(p):
    assert P.parse(str(p)) == p
    assert P.from_json(p.to_json()) == p


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == P()


@given(polys, polys)
def test_mirror_is_a_ring_map(a, b):
    assert (a * b).mirror() == a.mirror() * b.mirror()
    assert a.mirror().mirror() == a


@given(polys, st.integers(-5, 5))
def test_shift_matches_monomial_product(a, k):
    assert a.shift(k) == a * P.monomial(k)


@given(polys)
def test_evaluate_is_exact_on_fractions(a):
    x = Fraction(3, 2)
    assert a.evaluate(x) == sum(c * x ** e for e, c in a.terms.items())
