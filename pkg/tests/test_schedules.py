from fractions import Fraction

import pytest

import shiftlab as sl
from shiftlab import EpsilonSchedule, default_epsilon, default_schedules


def test_default_epsilon_exact_values():
    eps = default_epsilon(3)
    assert eps[1] == Fraction(1, 12)
    assert eps[2] == Fraction(1, 160)
    assert eps[3] == Fraction(1, 1344)


def test_default_alpha_exact_values():
    # sum_{j=-1}^{1} M^{1-j} is 3 for M = 1 and 7 for M = 2
    sch1 = default_schedules(sl.constant_weight(1), 1)
    assert sch1.alpha_at(1) == Fraction(1, 6)
    sch2 = default_schedules(sl.two_sided_weight(2, Fraction(1, 2)), 2)
    assert sch2.alpha_at(1) == Fraction(1, 14)
    assert sch2.M == 2
    # p = 2: 1 / (4 * 2 * (1+2+4+8+16))
    assert sch2.alpha_at(2) == Fraction(1, 248)


def test_schedule_invariants():
    with pytest.raises(ValueError):
        EpsilonSchedule(())
    with pytest.raises(ValueError):
        EpsilonSchedule((Fraction(1, 2), Fraction(0)))
    with pytest.raises(ValueError):
        EpsilonSchedule((Fraction(1, 4), Fraction(1, 2)))  # increasing
    eps = EpsilonSchedule((Fraction(1, 2), Fraction(1, 2)))  # plateau allowed
    assert eps.min_value(1, 2) == Fraction(1, 2)


def test_schedule_scaled_and_logs():
    eps = default_epsilon(2)
    doubled = eps.scaled([2, 2])
    assert doubled[1] == Fraction(1, 6)
    assert eps.min_log(1, 2) == pytest.approx(float(sl.log_abs(Fraction(1, 160))))


def test_schedule_config_round_trip():
    eps = default_epsilon(4)
    back = EpsilonSchedule.from_config(eps.to_config())
    assert back.values == eps.values
