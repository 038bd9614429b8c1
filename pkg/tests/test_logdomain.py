import math
from fractions import Fraction

import pytest

from shiftlab import LogScalar, log_abs


def test_log_abs_handles_big_ints():
    assert log_abs(10**400) == pytest.approx(400 * math.log(10), rel=1e-12)
    assert log_abs(Fraction(1, 10**400)) == pytest.approx(-400 * math.log(10), rel=1e-12)


def test_log_abs_rejects_zero():
    with pytest.raises(ValueError):
        log_abs(0)


def test_mul_div_signs():
    a = LogScalar.from_value(-2)
    b = LogScalar.from_value(Fraction(1, 2))
    assert (a * b).sign == -1
    assert (a * b).to_float() == pytest.approx(-1.0)
    assert (a / b).to_float() == pytest.approx(-4.0)
    assert (a * LogScalar.zero()).sign == 0


def test_pow_int():
    a = LogScalar.from_value(-2)
    assert a.pow_int(3).to_float() == pytest.approx(-8.0)
    assert a.pow_int(2).to_float() == pytest.approx(4.0)


def test_overflow_raises_underflow_is_zero():
    huge = LogScalar(1, 1e6)
    with pytest.raises(OverflowError):
        huge.to_float()
    tiny = LogScalar(1, -1e6)
    assert tiny.to_float() == 0.0
