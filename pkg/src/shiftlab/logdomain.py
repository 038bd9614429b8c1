"""Log-domain scalars.

Long weight products (10^5 factors of 2 and worse) overflow doubles, so every
product-like quantity in this package is carried as a (sign, log-modulus)
pair and only converted to a linear float when the caller actually needs one.
Scalars are real; complex phases are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

__all__ = ["LogScalar", "log_abs"]

# exp() overflows IEEE doubles just above this
_MAX_EXP_ARG = math.log(math.inf) if False else 709.782712893384


def log_abs(value) -> float:
    """log|value| for a nonzero int, Fraction or float.

    Exact integers of arbitrary size are fine: math.log accepts big ints.
    """
    if isinstance(value, Rational):
        num, den = value.numerator, value.denominator
        if num == 0:
            raise ValueError("log_abs of zero")
        return math.log(abs(num)) - math.log(den)
    v = float(value)
    if v == 0.0:
        raise ValueError("log_abs of zero")
    return math.log(abs(v))


def _sign(value) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


@dataclass(frozen=True)
class LogScalar:
    """A real scalar stored as sign and log-modulus.

    sign is -1, 0 or +1; log_abs is -inf exactly when sign is 0.
    """

    sign: int
    log_abs: float

    @staticmethod
    def zero() -> "LogScalar":
        return LogScalar(0, -math.inf)

    @staticmethod
    def one() -> "LogScalar":
        return LogScalar(1, 0.0)

    @classmethod
    def from_value(cls, value) -> "LogScalar":
        s = _sign(value)
        if s == 0:
            return cls.zero()
        return cls(s, log_abs(value))

    def __mul__(self, other: "LogScalar") -> "LogScalar":
        if self.sign == 0 or other.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_abs + other.log_abs)

    def __truediv__(self, other: "LogScalar") -> "LogScalar":
        if other.sign == 0:
            raise ZeroDivisionError("division by log-domain zero")
        if self.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_abs - other.log_abs)

    def pow_int(self, k: int) -> "LogScalar":
        if self.sign == 0:
            if k <= 0:
                raise ZeroDivisionError("0 ** nonpositive")
            return LogScalar.zero()
        sign = self.sign if k % 2 else 1
        return LogScalar(sign, self.log_abs * k)

    def abs(self) -> "LogScalar":
        return LogScalar(abs(self.sign), self.log_abs)

    def to_float(self) -> float:
        """Linear-domain value; raises OverflowError past double range.

        Deep underflow silently returns a (signed) 0.0, which is the right
        behaviour for residual magnitudes.
        """
        if self.sign == 0:
            return 0.0
        if self.log_abs > _MAX_EXP_ARG:
            raise OverflowError(
                f"log-domain value exp({self.log_abs:.6g}) exceeds double range; "
                "keep it in log domain"
            )
        return self.sign * math.exp(self.log_abs)

    def to_fraction_exact(self) -> Fraction:
        raise NotImplementedError("log-domain values are inexact; use the rational mode APIs")

    def isclose(self, other: "LogScalar", rel_tol: float = 1e-12, abs_tol: float = 1e-12) -> bool:
        if self.sign != other.sign:
            return self.sign == 0 and other.sign == 0
        if self.sign == 0:
            return True
        return math.isclose(self.log_abs, other.log_abs, rel_tol=rel_tol, abs_tol=abs_tol)
