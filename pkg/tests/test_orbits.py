import math
from fractions import Fraction

import numpy as np
import pytest

import shiftlab as sl
from shiftlab import (
    FiniteVector,
    SeparationRule,
    SpaceModel,
    apply_shift_power,
    build_vector,
    default_epsilon,
    default_schedules,
    enumerate_targets,
    generate_block_family,
    verify_orbit,
)


@pytest.fixture
def built():
    w = sl.two_sided_weight(2, Fraction(1, 2))
    eps = default_epsilon(2)
    fam = generate_block_family(2, SeparationRule.for_epsilon_floor(eps[2]),
                                gamma=4, horizon=1500)
    sch = default_schedules(w, 2)
    v = sl.VSequence(w)
    return w, fam, sch, v


def test_zero_vector_zero_errors(built):
    w, fam, sch, v = built
    T = enumerate_targets(v, 2, user_targets=[FiniteVector.zero(), FiniteVector.zero()])
    x = build_vector(w, fam, T, sch, window=1600)
    rep = verify_orbit(SpaceModel.c0_Z(), w, x, outer_horizon=800)
    assert rep.ok
    for q in (1, 2):
        assert rep.max_error(q) == 0.0
        # every exponent hits a zero target
        assert len(rep.hit_sets[q]) == 801


def test_single_target_telescoping(built):
    # z^(1) = e_0: (B_w^m x)_0 = (w_1...w_m) v_m = 1, residuals are 2^{-gap}
    w, fam, sch, v = built
    T = enumerate_targets(v, 2, user_targets=[FiniteVector({0: 1})])
    x = build_vector(w, fam, T, sch, window=1600)
    fv = x.to_finite_vector()
    m = int(fam.set_for(1).elements[2])
    shifted = apply_shift_power(w, m, fv)
    assert shifted[0] == pytest.approx(1.0, abs=1e-9)
    rep = verify_orbit(SpaceModel.c0_Z(), w, x, outer_horizon=800)
    assert rep.ok
    assert rep.max_error(1) < 0.5


def test_orbit_bound_default_targets(built):
    w, fam, sch, v = built
    T = enumerate_targets(v, 2)
    x = build_vector(w, fam, T, sch, window=1600)
    rep = verify_orbit(SpaceModel.c0_Z(), w, x, outer_horizon=800)
    assert rep.ok
    for q in (1, 2):
        assert rep.max_error(q) <= 2.0 ** (-q) + 1e-9 + rep.truncation[q]
    assert rep.truncation_rigorous


def test_hit_sets_contain_return_times(built):
    w, fam, sch, v = built
    T = enumerate_targets(v, 2)
    x = build_vector(w, fam, T, sch, window=1600)
    rep = verify_orbit(SpaceModel.c0_Z(), w, x, outer_horizon=800)
    for q in (1, 2):
        H = rep.hit_sets[q]
        for m in rep.m_values[q]:
            assert int(m) in H
        # superset => counting dominance
        Aq = fam.set_for(q).restrict(800)
        assert rep.hit_densities[q].upper >= sl.density_report(Aq, 800).upper - 1e-12


def test_hit_monotonicity_in_eps(built):
    w, fam, sch, v = built
    T = enumerate_targets(v, 2)
    x = build_vector(w, fam, T, sch, window=1600)
    small = verify_orbit(SpaceModel.c0_Z(), w, x, 800, hit_eps={1: 0.1, 2: 0.05})
    big = verify_orbit(SpaceModel.c0_Z(), w, x, 800, hit_eps={1: 0.5, 2: 0.25})
    for q in (1, 2):
        small_set = set(int(n) for n in small.hit_sets[q])
        big_set = set(int(n) for n in big.hit_sets[q])
        assert small_set <= big_set


def test_orbit_failure_reports_contributors(built):
    # shrink the allowed bound to force failures and inspect the dump
    w, fam, sch, v = built
    T = enumerate_targets(v, 2)
    x = build_vector(w, fam, T, sch, window=1600)
    rep = verify_orbit(SpaceModel.c0_Z(), w, x, outer_horizon=800, tol=-0.49)
    assert not rep.ok
    failure = rep.failures[0]
    assert failure.contributors
    assert "coord" in str(failure)


def test_window_precondition(built):
    w, fam, sch, v = built
    T = enumerate_targets(v, 2)
    x = build_vector(w, fam, T, sch, window=1600)
    with pytest.raises(sl.OrbitError):
        verify_orbit(SpaceModel.c0_Z(), w, x, outer_horizon=1600)


def test_conjugation_consistency(built):
    # || B_w^m phi_v(x~) - z ||_inf equals the v-weighted sup norm of
    # B^m x~ - y computed in the unweighted picture
    w, fam, sch, v = built
    T = enumerate_targets(v, 2)
    x = build_vector(w, fam, T, sch, window=1600)
    fv = x.to_finite_vector()
    x_unw = x.conjugated_vector()
    B = sl.unweighted()
    for q in (1, 2):
        for m in fam.set_for(q).elements[:3]:
            m = int(m)
            delivered = apply_shift_power(w, m, fv).sub(T.target(q))
            weighted_err = sl.norm(SpaceModel.c0_Z(), delivered)
            residual = apply_shift_power(B, m, x_unw).sub(T.conjugated(q))
            v_weighted = max(
                (abs(val) * math.exp(v.log_at(k).log_abs) for k, val in residual),
                default=0.0,
            )
            assert weighted_err == pytest.approx(v_weighted, rel=1e-10, abs=1e-12)
