"""Natural densities of subsets of N_0 and the upper-density family.

limsup/liminf of counting ratios card(A cap [0, n])/(n+1) are not decidable
at a finite horizon, so reports carry the horizon explicitly: the empirical
upper (lower) density is the max (min) of the counting ratios over a sample
grid restricted to the tail of the horizon.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

__all__ = [
    "IndexSet",
    "DensityReport",
    "density_report",
    "UpperDensityFamily",
    "upper_family_membership",
    "MembershipResult",
]


class IndexSet:
    """A strictly increasing finite set of nonnegative integers.

    An optional extension rule (horizon -> sorted elements) lets demo sets
    grow beyond the stored prefix; the rule must be consistent with the
    stored elements, which is validated on construction.
    """

    __slots__ = ("_elements", "_rule", "name")

    def __init__(self, elements: Iterable[int], rule: Optional[Callable[[int], Iterable[int]]] = None,
                 name: str = ""):
        arr = np.asarray(sorted(int(e) for e in elements), dtype=np.int64)
        if arr.size and arr[0] < 0:
            raise ValueError("index sets live in N_0")
        if arr.size > 1 and np.any(np.diff(arr) <= 0):
            raise ValueError("elements must be strictly increasing")
        self._elements = arr
        self._rule = rule
        self.name = name
        if rule is not None and arr.size:
            check = np.asarray(sorted(int(e) for e in rule(int(arr[-1]))), dtype=np.int64)
            if check.size != arr.size or np.any(check != arr):
                raise ValueError("extension rule disagrees with the stored prefix")

    @staticmethod
    def multiples(step: int, horizon: int) -> "IndexSet":
        """{l*step : l >= 1} up to horizon."""
        if step <= 0:
            raise ValueError("step must be positive")
        rule = lambda h: range(step, h + 1, step)
        return IndexSet(rule(horizon), rule=rule, name=f"multiples({step})")

    @staticmethod
    def powers(base: int, horizon: int) -> "IndexSet":
        """{base^k : k >= 0} up to horizon."""
        if base < 2:
            raise ValueError("base must be at least 2")

        def rule(h: int):
            out, v = [], 1
            while v <= h:
                out.append(v)
                v *= base
            return out

        return IndexSet(rule(horizon), rule=rule, name=f"powers({base})")

    @staticmethod
    def naturals(horizon: int) -> "IndexSet":
        rule = lambda h: range(0, h + 1)
        return IndexSet(rule(horizon), rule=rule, name="naturals")

    @property
    def elements(self) -> np.ndarray:
        return self._elements

    def __len__(self) -> int:
        return int(self._elements.size)

    def __iter__(self):
        return iter(int(e) for e in self._elements)

    def __contains__(self, n: int) -> bool:
        i = int(np.searchsorted(self._elements, n))
        return i < self._elements.size and int(self._elements[i]) == n

    def __eq__(self, other) -> bool:
        return isinstance(other, IndexSet) and np.array_equal(self._elements, other._elements)

    def __repr__(self):
        label = self.name or f"{len(self)} elements"
        return f"IndexSet({label})"

    def max(self) -> int:
        if not len(self):
            raise ValueError("empty index set")
        return int(self._elements[-1])

    def count_upto(self, n: int) -> int:
        """card(A cap [0, n])."""
        return int(np.searchsorted(self._elements, n, side="right"))

    def ratio(self, n: int) -> float:
        return self.count_upto(n) / (n + 1)

    def restrict(self, horizon: int) -> "IndexSet":
        return IndexSet(self._elements[self._elements <= horizon], name=self.name)

    def extend_to(self, horizon: int) -> "IndexSet":
        if self._rule is None:
            raise ValueError("no extension rule attached")
        return IndexSet(self._rule(horizon), rule=self._rule, name=self.name)

    def shift_left(self, n: int) -> "IndexSet":
        """(A - n) cap N_0."""
        kept = self._elements[self._elements >= n] - n
        return IndexSet(kept, name=f"{self.name}-{n}" if self.name else "")

    def union(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(np.union1d(self._elements, other._elements))


# ---------------------------------------------------------------------------
# density reports


@dataclass(frozen=True)
class DensityReport:
    """Counting-ratio samples with tail extrema, all horizon-qualified."""

    horizon: int
    tail_start: int
    samples: tuple  # of (n, ratio)
    upper: float    # max ratio over tail samples
    lower: float    # min ratio over tail samples

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(f"density extrema out of order: {self.lower}, {self.upper}")

    def csv_rows(self):
        yield ("n", "ratio")
        for n, r in self.samples:
            yield (n, repr(r))


def _geometric_grid(horizon: int, factor: float = 1.15) -> np.ndarray:
    pts = []
    n = 1.0
    while n <= horizon:
        pts.append(int(round(n)))
        n *= factor
    pts.append(horizon)
    return np.unique(np.asarray(pts, dtype=np.int64))


def density_report(A: IndexSet, horizon: int, tail_fraction: float = 0.5,
                   extra_points: Optional[Iterable[int]] = None) -> DensityReport:
    """Empirical density report of A up to the horizon.

    Ratios card(A cap [0,n])/(n+1) are sampled on a geometric grid (plus any
    extra points, e.g. block ends); the tail [tail_fraction*horizon, horizon]
    supplies the upper = max and lower = min estimates.
    """
    if horizon < 10:
        raise ValueError("horizon must be at least 10")
    if not (0.0 < tail_fraction < 1.0):
        raise ValueError("tail_fraction must lie in (0, 1)")
    grid = _geometric_grid(horizon)
    if extra_points is not None:
        extra = np.asarray([p for p in extra_points if 1 <= p <= horizon], dtype=np.int64)
        grid = np.unique(np.concatenate([grid, extra]))
    tail_start = int(np.ceil(tail_fraction * horizon))
    if not len(A):
        samples = tuple((int(n), 0.0) for n in grid)
        return DensityReport(horizon, tail_start, samples, 0.0, 0.0)
    counts = np.searchsorted(A.elements, grid, side="right")
    ratios = counts / (grid + 1.0)
    samples = tuple((int(n), float(r)) for n, r in zip(grid, ratios))
    tail = ratios[grid >= tail_start]
    if tail.size == 0:
        tail = ratios[-1:]
    return DensityReport(horizon, tail_start, samples, float(tail.max()), float(tail.min()))


# ---------------------------------------------------------------------------
# the upper-density Furstenberg family, concretely


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    witness_n: Optional[int] = None
    witness_prefix: Optional[IndexSet] = None
    checked_horizon: int = 0

    def __bool__(self) -> bool:
        return self.member


def upper_family_membership(A: IndexSet, delta: float, mu: int, horizon: int) -> MembershipResult:
    """Membership of A in the (delta, mu) piece of the upper-density family.

    Member iff some n in [mu, horizon] has card(A cap [0,n])/(n+1) > delta.
    On success the witnessing finite prefix A cap [0, n] is returned: any
    superset of it is a member for the same (delta, mu).
    """
    if not (0.0 < delta <= 1.0):
        raise ValueError("delta must lie in (0, 1]")
    if mu > horizon:
        raise ValueError("mu must not exceed the horizon")
    # Ratios only increase at elements of A, so the first witness is either
    # mu itself or an element of A in (mu, horizon].
    candidates = [mu] + [int(a) for a in A.elements if mu < a <= horizon]
    for n in candidates:
        if A.count_upto(n) / (n + 1) > delta:
            prefix = A.restrict(n)
            return MembershipResult(True, n, prefix, horizon)
    return MembershipResult(False, None, None, horizon)


@dataclass(frozen=True)
class UpperDensityFamily:
    """The upper Furstenberg family of sets of positive upper density.

    Realized through the double grid: delta ranges over {1/k : k >= 1} and mu
    over N_0, with A in the (delta, mu) piece iff some n >= mu has counting
    ratio > delta.  Membership in a piece is witnessed by a finite prefix and
    is therefore stable under supersets; it is monotone decreasing in both
    delta and mu.
    """

    max_k: int = 64  # the delta grid {1, 1/2, ..., 1/max_k} actually probed

    def delta_grid(self) -> tuple:
        return tuple(1.0 / k for k in range(1, self.max_k + 1))

    def piece_membership(self, A: IndexSet, delta: float, mu: int, horizon: int) -> MembershipResult:
        return upper_family_membership(A, delta, mu, horizon)

    def best_delta_to_horizon(self, A: IndexSet, horizon: int) -> Optional[float]:
        """Largest grid delta whose pieces A hits for every mu checkable.

        A is in the delta layer (to horizon) iff witnesses exist arbitrarily
        late; at a finite horizon we require a witness n >= mu for every
        mu <= the last witness, i.e. a witness in the tail.  Returns None if
        even the coarsest delta fails.
        """
        for delta in self.delta_grid():
            late = [int(a) for a in A.elements if a <= horizon and A.ratio(int(a)) > delta]
            if late and late[-1] >= horizon // 2:
                return delta
        return None
