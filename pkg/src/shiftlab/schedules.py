"""Tolerance and smallness schedules for the hypercyclic-vector construction.

The defaults are the exact constants used in the sufficiency proof:

    eps_p   = 1 / (p (2p+1) 4^p)
    alpha_p = 1 / (2^p p sum_{j=-p}^{p} M^{p-j}),   M = sup|w_n|,

kept as Fractions so that tests can pin them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .logdomain import log_abs
from .weights import WeightRule

__all__ = ["EpsilonSchedule", "Schedules", "default_epsilon", "default_schedules"]


@dataclass(frozen=True)
class EpsilonSchedule:
    """Positive, non-increasing tolerances eps_1 >= eps_2 >= ... > 0."""

    values: tuple  # of Fraction or float

    def __post_init__(self):
        if not self.values:
            raise ValueError("schedule needs at least one value")
        for v in self.values:
            if not v > 0:
                raise ValueError("schedule values must be strictly positive")
        for a, b in zip(self.values, self.values[1:]):
            if b > a:
                raise ValueError("schedule values must be non-increasing")

    @property
    def P(self) -> int:
        return len(self.values)

    def __getitem__(self, p: int):
        if not (1 <= p <= self.P):
            raise IndexError(f"schedule has no eps_{p}")
        return self.values[p - 1]

    def log(self, p: int) -> float:
        return log_abs(self[p])

    def min_log(self, p: int, q: int) -> float:
        return min(self.log(p), self.log(q))

    def min_value(self, p: int, q: int):
        return min(self[p], self[q])

    def scaled(self, factors) -> "EpsilonSchedule":
        """Pointwise-scaled schedule (still validated as a schedule)."""
        return EpsilonSchedule(tuple(v * f for v, f in zip(self.values, factors)))

    def to_config(self) -> list:
        return [str(v) if isinstance(v, Fraction) else v for v in self.values]

    @staticmethod
    def from_config(values) -> "EpsilonSchedule":
        return EpsilonSchedule(tuple(Fraction(v) if isinstance(v, str) else v for v in values))


def default_epsilon(P: int) -> EpsilonSchedule:
    """eps_p = 1/(p (2p+1) 4^p): eps_1 = 1/12, eps_2 = 1/160, ..."""
    if P < 1:
        raise ValueError("P must be at least 1")
    return EpsilonSchedule(tuple(Fraction(1, p * (2 * p + 1) * 4 ** p) for p in range(1, P + 1)))


@dataclass(frozen=True)
class Schedules:
    """The (alpha_p, eps_p) pair together with the norm bound M they assume."""

    alpha: tuple  # of Fraction
    epsilon: EpsilonSchedule
    M: Fraction

    @property
    def P(self) -> int:
        return len(self.alpha)

    def alpha_at(self, p: int) -> Fraction:
        return self.alpha[p - 1]

    def alpha_log(self, p: int) -> float:
        return log_abs(self.alpha_at(p))

    def to_config(self) -> dict:
        return {
            "alpha": [str(a) for a in self.alpha],
            "epsilon": self.epsilon.to_config(),
            "M": str(self.M),
        }


def default_schedules(w: WeightRule, P: int) -> Schedules:
    """The proof's exact schedules for the declared norm bound M = sup|w_n|."""
    M = Fraction(w.sup_abs)
    alphas = []
    for p in range(1, P + 1):
        geom = sum(M ** i for i in range(0, 2 * p + 1))  # sum_{j=-p}^{p} M^{p-j}
        alphas.append(1 / (Fraction(2 ** p * p) * geom))
    return Schedules(tuple(alphas), default_epsilon(P), M)
