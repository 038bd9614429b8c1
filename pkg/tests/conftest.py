"""Shared fixtures and randomized instance generators for the suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

import shiftlab as sl


@pytest.fixture
def w_shift2():
    """two_sided(2, 1/2): the canonical satisfied instance."""
    return sl.two_sided_weight(2, Fraction(1, 2))


@pytest.fixture
def c0Z():
    return sl.SpaceModel.c0_Z()


@pytest.fixture
def small_family():
    eps = sl.default_epsilon(2)
    sep = sl.SeparationRule.for_epsilon_floor(eps[2])
    return sl.generate_block_family(2, sep, gamma=4, horizon=2000)


# ---------------------------------------------------------------------------
# randomized instances (seeded; used by criteria tests and the acceptance run)

_FRACTION_POOL = [
    Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3),
    Fraction(3, 4), Fraction(1), Fraction(4, 3), Fraction(3, 2),
    Fraction(2), Fraction(3), Fraction(4),
]


def random_fraction(rng: random.Random, nonzero_only: bool = True) -> Fraction:
    f = rng.choice(_FRACTION_POOL)
    if rng.random() < 0.2:
        f = -f
    return f


def random_weight(rng: random.Random, kinds=("two_sided", "periodic", "table"),
                  invertible_bias: bool = False) -> sl.WeightRule:
    kind = rng.choice(kinds)
    if invertible_bias and rng.random() < 0.6:
        # weights shaped like the satisfied instances: growth right, decay left
        plus = rng.choice([Fraction(2), Fraction(3), Fraction(3, 2), Fraction(4)])
        minus = rng.choice([Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4)])
        return sl.two_sided_weight(plus, minus)
    if kind == "two_sided":
        return sl.two_sided_weight(random_fraction(rng), random_fraction(rng))
    if kind == "periodic":
        length = rng.randint(1, 4)
        return sl.periodic_weight([random_fraction(rng) for _ in range(length)])
    default = sl.two_sided_weight(random_fraction(rng), random_fraction(rng))
    keys = rng.sample(range(-6, 7), rng.randint(1, 5))
    return sl.table_weight({k: random_fraction(rng) for k in keys}, default)


def random_family(rng: random.Random, horizon: int, max_P: int = 4,
                  min_extra: int = 8) -> sl.HittingFamily:
    extra = rng.randint(min_extra, min_extra + 8)
    sep = sl.SeparationRule(extra=extra)
    kind = rng.random() < 0.5
    gamma = rng.choice([4, 5])
    K = rng.choice([16, 32])
    for P in range(rng.randint(1, max_P), 0, -1):
        try:
            if kind:
                return sl.generate_block_family(P, sep, gamma=gamma, horizon=horizon)
            return sl.generate_lower_family(P, sep, K=K, horizon=horizon)
        except sl.FamilyError:
            continue  # horizon too small for this P; shrink
    raise AssertionError(f"no feasible family at horizon {horizon}")
