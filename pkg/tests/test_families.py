import random

import pytest

import shiftlab as sl
from shiftlab import (
    FamilyError,
    HittingFamily,
    IndexSet,
    SeparationRule,
    check_separation,
    density_report,
    family_from_text,
    family_to_text,
    generate_block_family,
    generate_lower_family,
)

from conftest import random_family


def test_separation_rule_floor():
    sep = SeparationRule(extra=2)
    assert sep(1, 1) == 5 and sep(2, 3) == 8
    bad = SeparationRule(custom=lambda p, q: 1, descriptor="bad")
    with pytest.raises(FamilyError):
        bad(1, 1)


def test_separation_rule_parse_round_trip():
    sep = SeparationRule(extra=7)
    assert SeparationRule.parse(sep.descriptor).extra == 7
    with pytest.raises(FamilyError):
        SeparationRule.parse("q+p")


def test_check_separation_spec_cases():
    sep = SeparationRule()  # p + q + 1
    ok = HittingFamily((IndexSet([10, 20]), IndexSet([15])), sep, horizon=30)
    assert check_separation(ok) is None

    bad = HittingFamily((IndexSet([10, 20]), IndexSet([12])), sep, horizon=30)
    violation = check_separation(bad)
    assert violation is not None
    assert (violation.p, violation.q, violation.n, violation.m) == (1, 2, 10, 12)

    singleton = HittingFamily((IndexSet([0]),), sep, horizon=10)
    assert check_separation(singleton) is None  # no pairs at all


def test_check_separation_within_one_set():
    fam = HittingFamily((IndexSet([5, 7]),), SeparationRule(), horizon=10)
    violation = check_separation(fam)
    assert violation is not None and (violation.n, violation.m) == (5, 7)


def test_block_family_construction_trace():
    # step sep(1,1) + 1 = 4 inside the block [16, 32)
    sep = SeparationRule(custom=lambda p, q: 3, descriptor="const3")
    fam = generate_block_family(1, sep, gamma=4, horizon=100)
    A1 = fam.set_for(1)
    assert [n for n in A1 if 16 <= n < 32] == [16, 20, 24, 28]
    assert check_separation(fam) is None


def test_block_family_upper_density_at_block_ends():
    fam = generate_block_family(3, SeparationRule(), gamma=4, horizon=10**6)
    for p in (1, 2, 3):
        s = fam.sep(p, p) + 1
        assert sl.block_upper_density_estimate(fam, p) >= 1 / (2 * s) - 0.01


def test_block_family_horizon_too_small():
    with pytest.raises(FamilyError):
        generate_block_family(5, SeparationRule(), gamma=4, horizon=40)


def test_block_family_gamma_floor():
    with pytest.raises(FamilyError):
        generate_block_family(1, SeparationRule(), gamma=3, horizon=1000)


def test_lower_family_base_sets():
    K = 16
    fam = generate_lower_family(1, SeparationRule(), K=K, horizon=10**4)
    A1 = list(fam.set_for(1))
    assert A1[:4] == [2 * K, 6 * K, 10 * K, 14 * K]  # C_1, unpruned
    dr = density_report(fam.set_for(1), 10**4)
    assert dr.lower == pytest.approx(1 / (4 * K), rel=0.05)


def test_lower_family_separation_and_density():
    fam = generate_lower_family(4, SeparationRule(), K=16, horizon=10**6)
    assert check_separation(fam) is None
    for p in range(1, 5):
        base = 1 / (16 * 2 ** (p + 1))
        dr = density_report(fam.set_for(p), 10**6)
        assert dr.lower >= base / 2


def test_lower_family_pruning_respects_separation():
    # extra = 26 pushes the pruning radius past the 32-gap only for q >= 4,
    # so part of C_1 is removed and part survives
    fam = generate_lower_family(2, SeparationRule(extra=26), K=16, horizon=10**5)
    assert check_separation(fam) is None
    c1 = IndexSet(range(32, 10**5 + 1, 64))
    assert 0 < len(fam.set_for(1)) < len(c1)


def test_lower_family_errors():
    with pytest.raises(FamilyError):
        generate_lower_family(1, SeparationRule(), K=8, horizon=10**4)
    with pytest.raises(FamilyError):
        generate_lower_family(8, SeparationRule(), K=16, horizon=1000)
    # radius >= dyadic gap for every q empties A_1 entirely
    with pytest.raises(FamilyError, match="larger K"):
        generate_lower_family(2, SeparationRule(extra=40), K=16, horizon=10**5)


def test_generated_families_pass_separation():
    rng = random.Random(3)
    for _ in range(12):
        fam = random_family(rng, horizon=10**4)
        assert check_separation(fam) is None


def test_family_invariants():
    with pytest.raises(FamilyError):
        HittingFamily((IndexSet([]),), SeparationRule(), horizon=10)
    with pytest.raises(FamilyError):
        HittingFamily((IndexSet([11]),), SeparationRule(), horizon=10)


def test_family_text_round_trip():
    fam = generate_block_family(3, SeparationRule(extra=5), gamma=4, horizon=5000)
    text = family_to_text(fam)
    back = family_from_text(text)
    assert back.P == fam.P and back.horizon == fam.horizon
    assert back.sep.descriptor == fam.sep.descriptor
    for p in range(1, 4):
        assert list(back.set_for(p)) == list(fam.set_for(p))
    assert family_to_text(back) == text


def test_translation_keeps_block_upper_density():
    # Def-4.1-style translation property, empirically: estimates must be read
    # at sample points far beyond the shift
    fam = generate_block_family(2, SeparationRule(), gamma=4, horizon=10**6)
    A = fam.set_for(1)
    ends = [n for n in sl.block_end_samples(fam, 1) if n >= 10**5]
    base = max(A.ratio(n) for n in ends)
    for shift in (1, 10, 100, 1000):
        shifted = A.shift_left(shift)
        est = max(shifted.ratio(n - shift) for n in ends)
        assert est == pytest.approx(base, abs=0.01)
