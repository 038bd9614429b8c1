"""Target vectors for the hypercyclic-vector construction.

The construction consumes a sequence of targets z^(p), p = 1..P, whose
conjugated forms y^(p) = phi_v^{-1}(z^(p)) satisfy the proof-side
constraints

    supp y^(p) subset of [-p, p],    max_j |y^(p)_j| <= p.

The default enumeration walks dyadic-rational grids level by level (level g:
support in [-g, g], coefficients i * 2^{-res(g)} bounded by g) in a fixed
lexicographic order, so every grid point appears at some position and the
position-p constraints hold automatically.  Density of the enumerated family
is asymptotic in P; explicit user targets are accepted as well and are slotted
at the smallest admissible p.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .sequences import VSequence
from .spaces import FiniteVector, conjugate_phi_v, conjugate_phi_v_inverse

__all__ = ["TargetError", "TargetEntry", "TargetList", "enumerate_targets", "minimal_admissible_p"]


class TargetError(ValueError):
    """A target violates the support/coefficient constraints for every p <= P."""


@dataclass(frozen=True)
class TargetEntry:
    p: int
    z: FiniteVector  # the target in X
    y: FiniteVector  # phi_v^{-1}(z), the conjugated form the series uses

    def __post_init__(self):
        for k, val in self.y:
            if abs(k) > self.p:
                raise TargetError(f"y^{self.p} has support at {k}, outside [-{self.p}, {self.p}]")
            if abs(val) > self.p:
                raise TargetError(f"|y^{self.p}_{k}| = {abs(val)} exceeds the bound {self.p}")


@dataclass(frozen=True)
class TargetList:
    entries: tuple  # of TargetEntry, p = 1..P in order

    def __post_init__(self):
        for i, e in enumerate(self.entries, start=1):
            if e.p != i:
                raise TargetError(f"entry {i} is labelled p = {e.p}")

    @property
    def P(self) -> int:
        return len(self.entries)

    def target(self, p: int) -> FiniteVector:
        return self.entries[p - 1].z

    def conjugated(self, p: int) -> FiniteVector:
        return self.entries[p - 1].y

    def max_support(self) -> int:
        out = 0
        for e in self.entries:
            if len(e.y):
                out = max(out, max(abs(k) for k in e.y.support()))
        return out


def minimal_admissible_p(y: FiniteVector) -> int:
    """Smallest p with supp y in [-p, p] and max |y_j| <= p."""
    p = 1
    if len(y):
        p = max(p, max(abs(k) for k in y.support()))
        p = max(p, max(int(math.ceil(abs(val))) for _, val in y))
    return p


def _dyadic_grid_vectors(resolution: Callable[[int], int]):
    """Level-by-level lexicographic enumeration of dyadic grid vectors."""
    for level in itertools.count(1):
        g = resolution(level)
        step = Fraction(1, 2 ** g)
        coeffs = [i * step for i in range(-level * 2 ** g, level * 2 ** g + 1)]
        support = range(-level, level + 1)
        for combo in itertools.product(coeffs, repeat=len(support)):
            yield FiniteVector({k: c for k, c in zip(support, combo)})


def enumerate_targets(v: VSequence, P: int,
                      resolution: Optional[Callable[[int], int]] = None,
                      user_targets: Optional[Iterable[FiniteVector]] = None) -> TargetList:
    """Build the target list z^(1)..z^(P).

    Default: the dyadic grid enumeration in the conjugated picture, with
    z^(p) = phi_v(y^(p)).  With `user_targets`, each given z is converted via
    y = phi_v^{-1}(z) and slotted at the smallest admissible p not already
    taken; remaining slots are filled with zero targets.  A target
    inadmissible for every p <= P is rejected, naming its minimal p.
    """
    if P < 1:
        raise TargetError("P must be at least 1")
    entries: list[Optional[TargetEntry]] = [None] * P
    if user_targets is not None:
        slot = 0
        for z in user_targets:
            y = conjugate_phi_v_inverse(v, z)
            p_min = minimal_admissible_p(y)
            p = max(p_min, slot + 1)
            if p > P:
                raise TargetError(
                    f"target {z!r} needs p >= {p_min} and the next free slot is {slot + 1}, "
                    f"but P = {P}"
                )
            entries[p - 1] = TargetEntry(p, z, y)
            slot = p
        for p in range(1, P + 1):
            if entries[p - 1] is None:
                zero = FiniteVector.zero()
                entries[p - 1] = TargetEntry(p, zero, zero)
    else:
        res = resolution if resolution is not None else (lambda level: level)
        gen = _dyadic_grid_vectors(res)
        for p in range(1, P + 1):
            y = next(gen)
            z = conjugate_phi_v(v, y)
            entries[p - 1] = TargetEntry(p, z, y)
    return TargetList(tuple(entries))
