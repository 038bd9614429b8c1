import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import shiftlab as sl
from shiftlab import FiniteVector, apply_forward_power, apply_shift_power

from conftest import random_weight


def rational_vectors():
    return st.dictionaries(st.integers(-12, 12),
                           st.fractions(min_value=-5, max_value=5),
                           max_size=6)


def test_shift_examples():
    w = sl.two_sided_weight(3, Fraction(1, 3))
    assert apply_shift_power(w, 1, FiniteVector({5: 1})) == FiniteVector({4: 3})
    wc = sl.constant_weight(2)
    assert apply_shift_power(wc, 2, FiniteVector({0: 1})) == FiniteVector({-2: 4})
    x = FiniteVector({-3: 2, 4: -1})
    assert apply_shift_power(wc, 0, x) == x


def test_forward_examples():
    w = sl.two_sided_weight(3, Fraction(1, 3))
    assert apply_forward_power(w, 1, FiniteVector({0: 1})) == FiniteVector({1: Fraction(1, 3)})
    wc = sl.constant_weight(2)
    assert apply_forward_power(wc, 2, FiniteVector({0: 1})) == FiniteVector({2: Fraction(1, 4)})


def test_forward_rejects_non_invertible():
    w = sl.WeightRule(sl.constant_weight(2).descriptor, inf_abs=0)
    with pytest.raises(sl.WeightError):
        apply_forward_power(w, 1, FiniteVector({0: 1}))


@given(rational_vectors(), st.integers(0, 6))
@settings(max_examples=80, deadline=None)
def test_round_trip_exact(entries, m):
    w = sl.two_sided_weight(Fraction(5, 2), Fraction(2, 7))
    x = FiniteVector(entries)
    assert apply_shift_power(w, m, apply_forward_power(w, m, x)) == x
    assert apply_forward_power(w, m, apply_shift_power(w, m, x)) == x


@given(rational_vectors(), st.integers(0, 5), st.integers(0, 5))
@settings(max_examples=80, deadline=None)
def test_semigroup_exact(entries, a, b):
    w = sl.periodic_weight([2, Fraction(1, 2), 3])
    x = FiniteVector(entries)
    assert apply_shift_power(w, a + b, x) == apply_shift_power(w, a, apply_shift_power(w, b, x))


def test_semigroup_float_mode():
    rng = random.Random(23)
    w = random_weight(rng)
    x = FiniteVector({k: rng.uniform(-2, 2) for k in range(-5, 6)})
    lhs = apply_shift_power(w, 7, x)
    rhs = apply_shift_power(w, 3, apply_shift_power(w, 4, x))
    for k in set(lhs.entries) | set(rhs.entries):
        assert lhs[k] == pytest.approx(rhs[k], rel=1e-10, abs=1e-300)


@given(rational_vectors())
@settings(max_examples=60, deadline=None)
def test_phi_v_conjugacy_exact(entries):
    # phi_v(B y) = B_w(phi_v y) with B the unweighted shift
    w = sl.two_sided_weight(2, Fraction(1, 2))
    v = sl.VSequence(w)
    y = FiniteVector(entries)
    lhs = sl.conjugate_phi_v(v, apply_shift_power(sl.unweighted(), 1, y))
    rhs = apply_shift_power(w, 1, sl.conjugate_phi_v(v, y))
    assert lhs == rhs


@given(rational_vectors())
@settings(max_examples=60, deadline=None)
def test_reflection_conjugacy_exact(entries):
    # reflect(B_{w'} x) = F_{1/w}(reflect x)
    w = sl.two_sided_weight(Fraction(7, 3), Fraction(3, 5))
    w_ref = sl.invert_reflect(w)
    x = FiniteVector(entries)
    lhs = sl.reflect_vector(apply_shift_power(w_ref, 1, x))
    rhs = apply_forward_power(w, 1, sl.reflect_vector(x))
    assert lhs == rhs


def test_reflection_conjugacy_random_rules():
    rng = random.Random(29)
    for _ in range(15):
        w = random_weight(rng)
        w_ref = sl.invert_reflect(w)
        x = FiniteVector({rng.randint(-10, 10): Fraction(rng.randint(1, 9), rng.randint(1, 9))
                          for _ in range(4)})
        assert sl.reflect_vector(apply_shift_power(w_ref, 3, x)) == \
            apply_forward_power(w, 3, sl.reflect_vector(x))
