"""Sequence-space models, finitely supported vectors, and the two conjugacies.

Supported spaces are c0 and l^p (1 <= p < inf) over Z or over N_0.  All of
them have a 1-unconditional canonical basis and coordinate functionals of
norm 1, and their norms are monotone: decreasing any modulus never increases
the norm.  The triple norm (sup of norms of interval truncations) therefore
coincides with the norm on finitely supported vectors; the direct
sup-over-truncations computation is kept as the test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Rational
from typing import Callable, Optional

from .sequences import VSequence

__all__ = [
    "SpaceError",
    "SpaceModel",
    "FiniteVector",
    "norm",
    "triple_norm",
    "triple_norm_truncation_oracle",
    "reflect_vector",
    "conjugate_phi_v",
    "conjugate_phi_v_inverse",
]


class SpaceError(ValueError):
    """Unsupported space variant or a vector outside the space's index set."""


_VARIANTS = ("c0_Z", "lp_Z", "c0_N", "lp_N")


@dataclass(frozen=True)
class SpaceModel:
    """A concrete sequence-space model.

    variant: one of c0_Z, lp_Z, c0_N, lp_N; p is required for the lp variants.
    unconditional_constant and coordinate_bound are both 1 for every supported
    variant and are used as such by the checkers.  `custom_norm` is an
    untested extension point for user-defined monotone norms.
    """

    variant: str
    p: Optional[float] = None
    unconditional_constant: float = 1.0
    coordinate_bound: float = 1.0
    custom_norm: Optional[Callable[["FiniteVector"], float]] = None

    def __post_init__(self):
        if self.variant not in _VARIANTS and self.custom_norm is None:
            raise SpaceError(f"unsupported space variant {self.variant!r}")
        if self.variant.startswith("lp"):
            if self.p is None or not (1 <= self.p < math.inf):
                raise SpaceError("lp variants need p in [1, inf)")
        elif self.p is not None:
            raise SpaceError("p is only meaningful for lp variants")

    @property
    def bilateral(self) -> bool:
        return self.variant.endswith("_Z")

    @property
    def is_sup_norm(self) -> bool:
        return self.variant.startswith("c0")

    def check_support(self, x: "FiniteVector") -> None:
        if not self.bilateral and x.entries and min(x.support()) < 0:
            raise SpaceError(f"{self.variant} vectors are indexed by N_0")

    @staticmethod
    def c0_Z() -> "SpaceModel":
        return SpaceModel("c0_Z")

    @staticmethod
    def lp_Z(p: float) -> "SpaceModel":
        return SpaceModel("lp_Z", p=float(p))

    @staticmethod
    def c0_N() -> "SpaceModel":
        return SpaceModel("c0_N")

    @staticmethod
    def lp_N(p: float) -> "SpaceModel":
        return SpaceModel("lp_N", p=float(p))

    def to_config(self) -> dict:
        cfg = {"variant": self.variant}
        if self.p is not None:
            cfg["p"] = self.p
        return cfg

    @staticmethod
    def from_config(cfg: dict) -> "SpaceModel":
        return SpaceModel(cfg["variant"], p=cfg.get("p"))


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


class FiniteVector:
    """A finitely supported sequence; zero entries are never stored.

    Entries are floats or exact rationals (ints/Fractions).  Instances are
    immutable; all operations return new vectors.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries=()):
        d = {}
        for k, val in (entries.items() if isinstance(entries, dict) else entries):
            if val == 0:
                continue
            k = int(k)
            if k in d:
                raise ValueError(f"duplicate index {k}")
            d[k] = val
        self._entries = d

    @property
    def entries(self) -> dict:
        return dict(self._entries)

    @staticmethod
    def basis(n: int, value=1) -> "FiniteVector":
        return FiniteVector({n: value})

    @staticmethod
    def zero() -> "FiniteVector":
        return FiniteVector()

    def support(self) -> list[int]:
        return sorted(self._entries)

    def __getitem__(self, n: int):
        return self._entries.get(n, 0)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(sorted(self._entries.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteVector) and self._entries == other._entries

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in self)
        return f"FiniteVector({{{inner}}})"

    def is_exact(self) -> bool:
        return all(_is_exact(v) for v in self._entries.values())

    def add(self, other: "FiniteVector") -> "FiniteVector":
        d = dict(self._entries)
        for k, v in other._entries.items():
            d[k] = d.get(k, 0) + v
        return FiniteVector(d)

    def sub(self, other: "FiniteVector") -> "FiniteVector":
        d = dict(self._entries)
        for k, v in other._entries.items():
            d[k] = d.get(k, 0) - v
        return FiniteVector(d)

    def scale(self, c) -> "FiniteVector":
        return FiniteVector({k: c * v for k, v in self._entries.items()})

    def shift_index(self, offset: int) -> "FiniteVector":
        return FiniteVector({k + offset: v for k, v in self._entries.items()})

    def restrict(self, lo: int, hi: int) -> "FiniteVector":
        return FiniteVector({k: v for k, v in self._entries.items() if lo <= k <= hi})

    def max_abs_diff(self, other: "FiniteVector") -> float:
        keys = set(self._entries) | set(other._entries)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)


# ---------------------------------------------------------------------------
# norms


def norm(space: SpaceModel, x: FiniteVector) -> float:
    """The space norm of a finitely supported vector; norm(0) = 0."""
    space.check_support(x)
    if space.custom_norm is not None:
        return float(space.custom_norm(x))
    if not len(x):
        return 0.0
    if space.is_sup_norm:
        return float(max(abs(v) for _, v in x))
    p = space.p
    if p == 1:
        return float(sum(abs(v) for _, v in x))
    return float(sum(abs(float(v)) ** p for _, v in x) ** (1.0 / p))


def triple_norm(space: SpaceModel, x: FiniteVector) -> float:
    """sup over interval truncations [-m, n]; equals norm() on monotone spaces."""
    space.check_support(x)
    return norm(space, x)


def triple_norm_truncation_oracle(space: SpaceModel, x: FiniteVector) -> float:
    """Direct sup over all truncations to [-m, n], m, n >= 0.

    Exponential in nothing, just quadratic in the support span; used as the
    independent oracle for triple_norm.
    """
    space.check_support(x)
    if not len(x):
        return 0.0
    supp = x.support()
    m_max = max(0, -supp[0])
    n_max = max(0, supp[-1])
    best = 0.0
    for m in range(m_max + 1):
        for n in range(n_max + 1):
            best = max(best, norm(space, x.restrict(-m, n)))
    return best


# ---------------------------------------------------------------------------
# the two conjugacies


def reflect_vector(x: FiniteVector) -> FiniteVector:
    """(x_n) -> (x_{-n})."""
    return FiniteVector({-k: v for k, v in x.entries.items()})


def conjugate_phi_v(v: VSequence, x: FiniteVector, exact: Optional[bool] = None) -> FiniteVector:
    """phi_v(x) = (x_n v_n): maps the v-weighted copy of X onto X."""
    if exact is None:
        exact = x.is_exact()
    if exact:
        return FiniteVector({k: val * v.exact_at(k) for k, val in x.entries.items()})
    return FiniteVector({k: val * v.at(k) for k, val in x.entries.items()})


def conjugate_phi_v_inverse(v: VSequence, x: FiniteVector, exact: Optional[bool] = None) -> FiniteVector:
    """phi_v^{-1}(x) = (x_n / v_n)."""
    if exact is None:
        exact = x.is_exact()
    if exact:
        return FiniteVector({k: val / v.exact_at(k) for k, val in x.entries.items()})
    return FiniteVector({k: val / v.at(k) for k, val in x.entries.items()})
