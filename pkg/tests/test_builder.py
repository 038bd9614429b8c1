import warnings
from fractions import Fraction

import numpy as np
import pytest

import shiftlab as sl
from shiftlab import (
    BuildError,
    CheckHorizons,
    FiniteVector,
    HittingFamily,
    IndexSet,
    SeparationRule,
    build_vector,
    default_epsilon,
    default_schedules,
    enumerate_targets,
    generate_block_family,
)


@pytest.fixture
def setup():
    w = sl.two_sided_weight(2, Fraction(1, 2))
    eps = default_epsilon(2)
    fam = generate_block_family(2, SeparationRule.for_epsilon_floor(eps[2]),
                                gamma=4, horizon=1500)
    sch = default_schedules(w, 2)
    v = sl.VSequence(w)
    return w, fam, sch, v


def test_zero_targets_give_zero_vector(setup):
    w, fam, sch, v = setup
    T = enumerate_targets(v, 2, user_targets=[FiniteVector.zero(), FiniteVector.zero()])
    x = build_vector(w, fam, T, sch, window=1600)
    assert x.support_size == 0
    assert x.to_finite_vector() == FiniteVector.zero()


def test_single_target_places_v_values(setup):
    # z^(1) = e_0: the delivered vector carries v_n at every n in A_1
    w, fam, sch, v = setup
    T = enumerate_targets(v, 2, user_targets=[FiniteVector({0: 1})])
    x = build_vector(w, fam, T, sch, window=1600)
    fv = x.to_finite_vector()
    assert sorted(fv.support()) == list(fam.set_for(1))
    for n in fam.set_for(1):
        assert fv[n] == pytest.approx(v.at(n), rel=1e-12)


def test_disjoint_supports_across_targets(setup):
    w, fam, sch, v = setup
    T = enumerate_targets(v, 2)
    x = build_vector(w, fam, T, sch, window=1600)
    assert len(np.unique(x.idx)) == x.support_size
    # entries from p and q never share an index: separation made that certain
    for p in (1, 2):
        own = x.idx[x.entry_p == p]
        other = x.idx[x.entry_p != p]
        assert not set(own.tolist()) & set(other.tolist())


def test_window_too_small_is_an_error(setup):
    w, fam, sch, v = setup
    T = enumerate_targets(v, 2)
    with pytest.raises(BuildError, match="window"):
        build_vector(w, fam, T, sch, window=fam.max_element())


def test_separation_violation_is_an_error(setup):
    w, _, sch, v = setup
    bad = HittingFamily((IndexSet([10, 20]), IndexSet([12])), SeparationRule(), horizon=100)
    T = enumerate_targets(v, 2)
    with pytest.raises(BuildError, match="separation"):
        build_vector(w, bad, T, sch, window=200, norm_check="skip")


def test_series_bound_filter_drops_leading_elements():
    # unweighted shift: |v_{n+p}| = 1 >= alpha_p everywhere, so the filter
    # must fail rather than silently accept
    w = sl.constant_weight(1)
    fam = generate_block_family(1, SeparationRule(extra=4), gamma=4, horizon=300)
    sch = default_schedules(w, 1)
    v = sl.VSequence(w)
    T = enumerate_targets(v, 1)
    with pytest.raises(BuildError, match="alpha"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            build_vector(w, fam, T, sch, window=400)


def test_series_bound_filter_partial_drop():
    # growth only on the positive side: early A_1 elements carry |v| just
    # above alpha_1 until the filter removes them
    w = sl.two_sided_weight(Fraction(3, 2), Fraction(1, 2))
    fam = generate_block_family(1, SeparationRule(), gamma=4, horizon=2000)
    sch = default_schedules(w, 1)
    v = sl.VSequence(w)
    T = enumerate_targets(v, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        x = build_vector(w, fam, T, sch, window=2100)
    # alpha_1 = 1/(2 * (M^2+M+1)) with M = 3/2: |v_{n+1}| = (2/3)^{n+1} < alpha_1
    # needs n large; the first block elements must have been dropped
    assert x.dropped_leading[0] > 0
    assert x.support_size > 0


def test_norm_check_warns_on_uncertified_pair(setup):
    w, fam, sch, v = setup
    T = enumerate_targets(v, 2)
    shaky = sl.table_weight({1000: Fraction(1, 2)}, w)
    with pytest.warns(UserWarning, match="certificate"):
        build_vector(shaky, fam, T, sch, window=1600)


def test_vector_serialization_round_trip_fields(setup):
    w, fam, sch, v = setup
    T = enumerate_targets(v, 2)
    x = build_vector(w, fam, T, sch, window=1600)
    d = x.to_dict()
    assert d["window"] == 1600
    assert len(d["entries"]) == x.support_size
    assert d["entries"][0].keys() == {"index", "y", "sign", "log_abs"}
