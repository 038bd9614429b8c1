"""Hitting-set families: pairwise disjoint, separated sets of return times.

The characterizations consume a family A_1..A_P of pairwise disjoint subsets
of N_0 such that distinct elements n in A_p, m in A_q satisfy |n - m| > p + q
(and at least a caller-chosen separation sep(p, q) >= p + q + 1, since the
weight conditions typically need gaps exceeding p + q + log(1/eps)).

Two generators are provided:

* block round-robin (positive upper density): geometric blocks
  B_k = [gamma^k, 2 gamma^k) are assigned cyclically to p = 1..P and filled
  with an arithmetic progression of step s(p) = sep(p, p) + 1.  Cross-block
  gaps grow geometrically, so cross-set separation is automatic once the
  leading blocks are dropped; the counting ratio at the end of a p-block is
  at least 1/(2 s(p)).

* pruned dyadic (positive lower density): C_p = {K 2^p (2k+1) : k >= 0} are
  disjoint by 2-adic valuation and periodic with density 1/(K 2^{p+1});
  elements of C_p too close to some higher-q base set are removed.  For
  K >= 16 and moderate separations no pruning occurs at all, and the pruning
  loss is otherwise kept below half the base density or reported.

Both outputs are validated exhaustively by `check_separation`.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .densities import IndexSet

__all__ = [
    "FamilyError",
    "SeparationRule",
    "HittingFamily",
    "SeparationViolation",
    "generate_block_family",
    "generate_lower_family",
    "block_end_samples",
    "block_upper_density_estimate",
    "check_separation",
    "family_to_text",
    "family_from_text",
]


class FamilyError(ValueError):
    """Family construction failed or invariants cannot hold."""


@dataclass(frozen=True)
class SeparationRule:
    """Required minimal gap sep(p, q) between members of A_p and A_q.

    The affine form p + q + 1 + extra covers every use in this package and is
    the only form that serializes; arbitrary callables are accepted for
    experiments via `custom`.
    """

    extra: int = 0
    custom: Optional[Callable[[int, int], int]] = None
    descriptor: str = ""

    def __post_init__(self):
        if self.custom is None:
            if self.extra < 0:
                raise FamilyError("extra separation must be nonnegative")
            object.__setattr__(self, "descriptor", f"p+q+1+{self.extra}")
        elif not self.descriptor:
            object.__setattr__(self, "descriptor", "custom")

    def __call__(self, p: int, q: int) -> int:
        gap = self.custom(p, q) if self.custom is not None else p + q + 1 + self.extra
        if gap < p + q + 1:
            raise FamilyError(f"sep({p},{q}) = {gap} is below the floor p+q+1")
        return gap

    @staticmethod
    def parse(descriptor: str) -> "SeparationRule":
        m = re.fullmatch(r"p\+q\+1\+(\d+)", descriptor.strip())
        if not m:
            raise FamilyError(f"cannot parse separation descriptor {descriptor!r}")
        return SeparationRule(extra=int(m.group(1)))

    @staticmethod
    def for_epsilon_floor(eps_min) -> "SeparationRule":
        """p + q + 1 + ceil(log2(1/eps_min)): gaps that dominate the schedule."""
        extra = int(math.ceil(math.log2(1.0 / float(eps_min))))
        return SeparationRule(extra=max(0, extra))


@dataclass(frozen=True)
class SeparationViolation:
    p: int
    q: int
    n: int
    m: int
    required: int

    def __str__(self):
        return (f"|n - m| = {abs(self.n - self.m)} for n = {self.n} in A_{self.p}, "
                f"m = {self.m} in A_{self.q}; required > {self.required - 1}")


@dataclass(frozen=True)
class HittingFamily:
    """A_1..A_P with separation metadata; immutable and exactly validated."""

    sets: tuple          # of IndexSet
    sep: SeparationRule
    horizon: int
    construction: str = "explicit"

    def __post_init__(self):
        if not self.sets:
            raise FamilyError("family needs at least one set")
        for p, A in enumerate(self.sets, start=1):
            if not len(A):
                raise FamilyError(f"A_{p} is empty up to the horizon")
            if A.max() > self.horizon:
                raise FamilyError(f"A_{p} exceeds the declared horizon")

    @property
    def P(self) -> int:
        return len(self.sets)

    def set_for(self, p: int) -> IndexSet:
        if not (1 <= p <= self.P):
            raise FamilyError(f"p = {p} outside 1..{self.P}")
        return self.sets[p - 1]

    def restrict(self, horizon: int) -> "HittingFamily":
        return HittingFamily(
            tuple(A.restrict(horizon) for A in self.sets),
            self.sep, horizon, self.construction,
        )

    def replace_set(self, p: int, A: IndexSet) -> "HittingFamily":
        sets = list(self.sets)
        sets[p - 1] = A
        return HittingFamily(tuple(sets), self.sep, self.horizon, self.construction + "+filtered")

    def max_element(self) -> int:
        return max(A.max() for A in self.sets)


def check_separation(family: HittingFamily) -> Optional[SeparationViolation]:
    """Exhaustive pairwise check up to the horizon.

    Returns None on pass, else the lexicographically first violating
    (p, q, n, m).  A pair violates if |n - m| <= p + q or |n - m| < sep(p, q).
    """
    P = family.P
    for p in range(1, P + 1):
        Ap = family.set_for(p).elements
        for q in range(1, P + 1):
            Aq = family.set_for(q).elements
            radius = max(p + q, family.sep(p, q) - 1)
            # windows [n - radius, n + radius] around each n in A_p
            lo = np.searchsorted(Aq, Ap - radius, side="left")
            hi = np.searchsorted(Aq, Ap + radius, side="right")
            counts = hi - lo
            if p == q:
                counts = counts - 1  # n itself sits in its own window
            bad = np.nonzero(counts > 0)[0]
            if bad.size:
                i = int(bad[0])
                n = int(Ap[i])
                for j in range(int(lo[i]), int(hi[i])):
                    m = int(Aq[j])
                    if m != n:
                        return SeparationViolation(p, q, n, m, family.sep(p, q))
    return None


def require_separation(family: HittingFamily) -> None:
    violation = check_separation(family)
    if violation is not None:
        raise FamilyError(f"separation violated: {violation}")


# ---------------------------------------------------------------------------
# generators


def generate_block_family(P: int, sep: SeparationRule, gamma: int = 4,
                          horizon: int = 10**6) -> HittingFamily:
    """Round-robin geometric-block family with positive upper density."""
    if P < 1:
        raise FamilyError("P must be at least 1")
    if gamma < 4:
        raise FamilyError("block growth gamma must be at least 4")
    max_sep = max(sep(p, q) for p in range(1, P + 1) for q in range(1, P + 1))
    # drop leading blocks until the inter-block gap exceeds every separation
    k0 = 0
    while gamma ** (k0 + 1) - 2 * gamma ** k0 + 1 <= max_sep:
        k0 += 1
    elements = [[] for _ in range(P)]
    k = k0
    while gamma ** k <= horizon:
        base = gamma ** k
        end = min(2 * base - 1, horizon)
        p = (k - k0) % P + 1
        step = sep(p, p) + 1
        elements[p - 1].extend(range(base, end + 1, step))
        k += 1
    sets = []
    for p in range(1, P + 1):
        if not elements[p - 1]:
            raise FamilyError(
                f"horizon {horizon} leaves no block for p = {p}; "
                f"need gamma^{k0 + p - 1} <= horizon"
            )
        sets.append(IndexSet(elements[p - 1], name=f"A_{p}"))
    fam = HittingFamily(tuple(sets), sep, horizon,
                        construction=f"block(gamma={gamma},k0={k0})")
    require_separation(fam)
    return fam


def block_end_samples(family: HittingFamily, p: int) -> list[int]:
    """The block-end sample points 2*gamma^k - 1 for the blocks feeding A_p."""
    m = re.search(r"gamma=(\d+),k0=(\d+)", family.construction)
    if not m:
        raise FamilyError("not a block-constructed family")
    gamma, k0 = int(m.group(1)), int(m.group(2))
    out = []
    k = k0 + (p - 1)
    while gamma ** k <= family.horizon:
        out.append(min(2 * gamma ** k - 1, family.horizon))
        k += family.P
    return out


def block_upper_density_estimate(family: HittingFamily, p: int) -> float:
    """Empirical upper density of A_p taken at its block-end samples.

    Block ends realize the counting-ratio limsup for this construction (the
    generic tail extrema miss them once later blocks belong to other p).
    """
    A = family.set_for(p)
    return max(A.ratio(n) for n in block_end_samples(family, p))


def generate_lower_family(P: int, sep: SeparationRule, K: int = 16,
                          horizon: int = 10**6) -> HittingFamily:
    """Pruned dyadic-valuation family with positive lower density."""
    if P < 1:
        raise FamilyError("P must be at least 1")
    if K < 16:
        raise FamilyError("dyadic base K must be at least 16")
    q_max = int(math.floor(math.log2(horizon / K))) if horizon >= K else 0
    if q_max < P:
        raise FamilyError(f"horizon {horizon} too small: K*2^{P} must not exceed it")

    def base_set(p: int, upto: int) -> np.ndarray:
        step = K * 2 ** (p + 1)
        first = K * 2 ** p
        return np.arange(first, upto + 1, step, dtype=np.int64)

    sets = []
    for p in range(1, P + 1):
        spacing = K * 2 ** (p + 1)
        if sep(p, p) >= spacing:
            raise FamilyError(f"sep({p},{p}) = {sep(p, p)} is not below the base spacing {spacing}")
        Cp = base_set(p, horizon)
        keep = np.ones(Cp.size, dtype=bool)
        for q in range(p + 1, q_max + 1):
            gap = sep(p, q)
            Cq = base_set(q, horizon + gap)
            if not Cq.size:
                continue
            # nearest element of C_q to each element of C_p
            pos = np.searchsorted(Cq, Cp)
            dist = np.full(Cp.size, np.iinfo(np.int64).max)
            right = pos < Cq.size
            dist[right] = np.abs(Cq[pos[right]] - Cp[right])
            left = pos > 0
            dist[left] = np.minimum(dist[left], np.abs(Cp[left] - Cq[pos[left] - 1]))
            keep &= dist > gap
        pruned = Cp[keep]
        if not pruned.size:
            raise FamilyError(
                f"pruning emptied A_{p} up to horizon {horizon}; use a larger K"
            )
        sets.append(IndexSet(pruned, name=f"A_{p}"))
    fam = HittingFamily(tuple(sets), sep, horizon,
                        construction=f"lower(K={K})")
    require_separation(fam)
    return fam


# ---------------------------------------------------------------------------
# text serialization: header block + newline-delimited integers


def family_to_text(family: HittingFamily) -> str:
    buf = io.StringIO()
    buf.write("# shiftlab hitting-family v1\n")
    buf.write(f"P {family.P}\n")
    buf.write(f"sep {family.sep.descriptor}\n")
    buf.write(f"horizon {family.horizon}\n")
    buf.write(f"construction {family.construction}\n")
    for p in range(1, family.P + 1):
        buf.write(f"set {p}\n")
        for n in family.set_for(p):
            buf.write(f"{n}\n")
    return buf.getvalue()


def family_from_text(text: str) -> HittingFamily:
    header = {}
    sets: list[list[int]] = []
    current: Optional[list[int]] = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("set "):
            idx = int(line.split()[1])
            if idx != len(sets) + 1:
                raise FamilyError(f"sets must appear in order; got set {idx}")
            current = []
            sets.append(current)
        elif current is not None:
            current.append(int(line))
        else:
            key, _, value = line.partition(" ")
            header[key] = value.strip()
    try:
        P = int(header["P"])
        sep = SeparationRule.parse(header["sep"])
        horizon = int(header["horizon"])
    except KeyError as exc:
        raise FamilyError(f"missing header field {exc}") from exc
    if len(sets) != P:
        raise FamilyError(f"expected {P} sets, found {len(sets)}")
    fam = HittingFamily(
        tuple(IndexSet(s, name=f"A_{p}") for p, s in enumerate(sets, start=1)),
        sep, horizon, header.get("construction", "explicit"),
    )
    return fam
