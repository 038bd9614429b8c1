from fractions import Fraction

import pytest

import shiftlab as sl
from shiftlab import FiniteVector, TargetError, enumerate_targets, minimal_admissible_p


@pytest.fixture
def v2():
    return sl.VSequence(sl.two_sided_weight(2, Fraction(1, 2)))


def test_zero_target_admissible_at_one(v2):
    T = enumerate_targets(v2, 1, user_targets=[FiniteVector.zero()])
    assert T.target(1) == FiniteVector.zero()
    assert T.conjugated(1) == FiniteVector.zero()


def test_e0_target(v2):
    T = enumerate_targets(v2, 1, user_targets=[FiniteVector({0: 1})])
    assert T.conjugated(1) == FiniteVector({0: 1})  # v_0 = 1


def test_e2_needs_p_four(v2):
    # y_2 = 1/v_2 = 4, so the coefficient bound forces p >= 4
    y = sl.conjugate_phi_v_inverse(v2, FiniteVector({2: 1}))
    assert y == FiniteVector({2: 4})
    assert minimal_admissible_p(y) == 4
    with pytest.raises(TargetError, match="p >= 4"):
        enumerate_targets(v2, 3, user_targets=[FiniteVector({2: 1})])
    T = enumerate_targets(v2, 4, user_targets=[FiniteVector({2: 1})])
    assert T.entries[3].p == 4 and len(T.conjugated(4)) == 1
    # slots 1..3 fall back to zero targets
    assert all(not len(T.target(p)) for p in (1, 2, 3))


def test_user_targets_keep_order(v2):
    za, zb = FiniteVector({0: 1}), FiniteVector({0: -1})
    T = enumerate_targets(v2, 3, user_targets=[za, zb])
    assert T.target(1) == za and T.target(2) == zb


def test_default_enumeration_structure(v2):
    T = enumerate_targets(v2, 6)
    assert T.P == 6
    seen = set()
    for entry in T.entries:
        y = entry.y
        assert all(abs(k) <= entry.p for k in y.support())
        assert all(abs(val) <= entry.p for _, val in y)
        key = tuple(sorted(y.entries.items()))
        assert key not in seen  # enumeration never repeats within a prefix
        seen.add(key)
    # z = phi_v(y) really is the conjugated form
    for entry in T.entries:
        assert sl.conjugate_phi_v(v2, entry.y) == entry.z


def test_default_enumeration_is_deterministic(v2):
    a = enumerate_targets(v2, 5)
    b = enumerate_targets(v2, 5)
    for ea, eb in zip(a.entries, b.entries):
        assert ea.y == eb.y and ea.z == eb.z


def test_entry_validation():
    with pytest.raises(TargetError):
        sl.TargetEntry(1, FiniteVector({2: 1}), FiniteVector({2: 1}))
    with pytest.raises(TargetError):
        sl.TargetEntry(1, FiniteVector({0: 3}), FiniteVector({0: 3}))
