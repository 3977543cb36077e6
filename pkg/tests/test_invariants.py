import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from gen import random_diagram, random_moves
from knotspec.curves import BUNDLED, bundled, torus_knot
from knotspec.diagrams import KnotoidDiagram, apply_move, diagrammatic_height, r1_insertions, simplify
from knotspec.errors import CapExceeded
from knotspec.invariants import (
    TRIVIAL, Fingerprint, UnresolvedClass, bracket, fingerprint, jones_normalized, jones_t, writhe,
)
from knotspec.polynomial import LOOP, LaurentPolynomial as P
from knotspec.projection import direction_array, project_codes

D = KnotoidDiagram.from_code
A = P.monomial(1)
A_INV = P.monomial(-1)
KINK = D("o:O1+U1+")
TREFOIL_KNOTOID = D("o:O1+U2+O3+U1+O2+U3+")
HEIGHT_ONE = D("o:U1+O2+O1+U2+")


def test_writhe_examples():
    assert writhe(KnotoidDiagram.trivial()) == 0
    assert writhe(KINK) == 1
    assert writhe(KINK.mirror()) == -1
    assert writhe(TREFOIL_KNOTOID) == 3 and writhe(TREFOIL_KNOTOID.mirror()) == -3


def test_bracket_examples():
    assert bracket(KnotoidDiagram.trivial()) == P.one()
    assert bracket(D("c:")) == P.one()
    assert bracket(KINK) == P({3: -1})
    assert bracket(D(oracles.TREFOIL_CODE)).terms == oracles.state_sum_bracket(oracles.TREFOIL_CODE)


def test_state_oracle_enumerates_eight_states_for_the_trefoil():
    # the 8-state sum must reproduce the tabulated Jones of the right-handed trefoil
    assert oracles.state_sum_jones(oracles.TREFOIL_CODE) == {-4: 1, -12: 1, -16: -1}


@given(st.integers(0, 10**6))
def test_bracket_matches_state_oracle(seed):
    for closed in (False, True):
        d = random_diagram(seed, 0, 10, closed=closed)
        assert bracket(d).terms == oracles.state_sum_bracket(d.code)


@given(st.integers(0, 10**6))
def test_split_loop_factor_through_the_kink_skein(seed):
    # <D with kink> = A <D u O> + A^-1 <D> for a positive kink (smoothings swap for a negative one),
    # and <D u O> = (-A^2 - A^-2) <D>
    d = random_diagram(seed, 0, 8)
    b = bracket(d)
    for mv in r1_insertions(d):
        sign = mv.args[2]
        expect = (A * LOOP + A_INV) * b if sign > 0 else (A_INV * LOOP + A) * b
        assert bracket(apply_move(d, mv)) == expect


def test_bracket_cap():
    with pytest.raises(CapExceeded):
        bracket(TREFOIL_KNOTOID, cap=2)
    assert bracket(TREFOIL_KNOTOID, cap=3) == bracket(TREFOIL_KNOTOID)


def test_jones_examples():
    assert jones_normalized(KnotoidDiagram.trivial()) == P.one()
    assert jones_normalized(KINK) == P.one()
    assert jones_normalized(KINK.mirror()) == P.one()
    assert jones_normalized(HEIGHT_ONE) == P({-4: 1, -6: 1, -10: -1})
    t = jones_t(D(oracles.TREFOIL_CODE))
    assert t == {1: 1, 3: 1, 4: -1}


@given(st.integers(0, 10**6))
def test_jones_survives_random_moves(seed):
    rng = np.random.default_rng(seed)
    d = random_diagram(seed, 2, 10)
    ref = jones_normalized(d)
    for e in random_moves(d, 50, rng):
        assert jones_normalized(e) == ref


@given(st.integers(0, 10**6))
def test_mirror_maps_a_to_a_inverse_on_random_diagrams(seed):
    d = random_diagram(seed, 0, 10)
    assert bracket(d.mirror()) == bracket(d).mirror()
    assert jones_normalized(d.mirror()) == jones_normalized(d).mirror()


@pytest.mark.parametrize("name", BUNDLED + ("torus_2_3_32",))
def test_mirror_symmetry_on_fixtures(name):
    K = torus_knot(2, 3, 32) if name.startswith("torus") else bundled(name)
    dirs = direction_array(16, seed=5)
    code = next(c for c in project_codes(K.vertices, True, dirs) if c)
    d = simplify(D(code)).diagram
    assert bracket(d.mirror(), cap=40) == bracket(d, cap=40).mirror()


def test_bundled_jones_polynomials():
    # chirality of each grid fixture was chosen to match these tabulated values
    expect = {"3_1": {-4: 1, -12: 1, -16: -1}, "4_1": {8: 1, 4: -1, 0: 1, -4: -1, -8: 1}}
    dirs = direction_array(16, seed=5)
    for name, terms in expect.items():
        code = next(c for c in project_codes(bundled(name).vertices, True, dirs) if c)
        assert jones_normalized(simplify(D(code)).diagram).terms == terms


# ------------------------------------------------------------ fingerprints

def test_fingerprint_of_trivial():
    fp = fingerprint(KnotoidDiagram.trivial())
    assert fp == TRIVIAL and fp.is_trivial() and fp.knot_type and fp.height == 0
    assert fingerprint(KINK) == TRIVIAL


def test_fingerprint_of_the_knot_type_trefoil():
    fp = fingerprint(TREFOIL_KNOTOID)
    assert fp.knot_type and fp.height == 0
    assert fp.under == fp.over == fp.jones
    assert fp.under.terms == oracles.state_sum_jones(oracles.TREFOIL_CODE)


def test_fingerprint_of_the_height_one_knotoid():
    fp = fingerprint(HEIGHT_ONE)
    assert not fp.knot_type and fp.height == 1
    assert fp.under == P.one()
    assert fp.over.terms == oracles.TREFOIL_JONES
    assert fp.under != fp.over


def test_unresolved_above_cap():
    fp = fingerprint(TREFOIL_KNOTOID, cap=2)
    assert isinstance(fp, UnresolvedClass) and fp.crossings == 3


@given(st.integers(0, 10**6))
def test_fingerprint_is_move_invariant(seed):
    rng = np.random.default_rng(seed)
    d = random_diagram(seed, 1, 8)
    ref = fingerprint(d)
    for e in random_moves(d, 10, rng, max_crossings=10):
        pass
    assert fingerprint(e) == ref


@given(st.integers(0, 10**6))
def test_knot_type_flag_and_height(seed):
    d = random_diagram(seed, 0, 10)
    fp = fingerprint(d)
    if fp.knot_type:
        assert fp.under == fp.over
    if fp.under != fp.over:
        assert not fp.knot_type and fp.height >= 1 and diagrammatic_height(d) >= 1


def test_fingerprint_json_round_trip():
    for d in (HEIGHT_ONE, TREFOIL_KNOTOID, KINK):
        fp = fingerprint(d)
        back = Fingerprint.from_json(fp.to_json())
        assert back == fp and back.key == fp.key and back.height == fp.height
