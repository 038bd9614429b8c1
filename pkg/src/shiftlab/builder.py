"""Assembly of the explicit hypercyclic vector from a hitting family.

In the conjugated (unweighted) picture the vector is the series

    x~ = sum_p sum_{j=-p}^{p} y^(p)_j sum_{n in A_p} e_{n+j},

whose coefficient supports are pairwise disjoint whenever the family is
separated; the delivered vector is x = phi_v(x~), stored sparsely on an
explicit window with log-domain coefficients (entries like v_n at n ~ 10^5
underflow doubles long before they stop mattering).

Before assembly the family is post-filtered so that the windowed smallness
condition ||sum_{n in A_p} v_{n+p} e_{n+p}|| < alpha_p holds: leading
elements of A_p (the dominant contributors for admissible weights) are
dropped until it does.  This makes the proof's re-indexing step concrete.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .densities import IndexSet
from .families import HittingFamily, check_separation
from .schedules import Schedules
from .sequences import VSequence
from .spaces import FiniteVector, SpaceModel
from .targets import TargetList
from .weights import WeightRule

__all__ = ["BuildError", "AHCVector", "build_vector", "enforce_series_bound"]


class BuildError(ValueError):
    """Vector assembly failed (window, collision, or smallness filter)."""


@dataclass(frozen=True)
class AHCVector:
    """A windowed hypercyclic-vector candidate with its provenance.

    Coefficients are stored as structured arrays: the delivered vector has
    x_{idx[i]} = y[i] * v_{idx[i]}, kept as sign/log-modulus.  The unweighted
    (conjugated) coefficients y are exact grid rationals stored as floats.
    """

    window: int                    # coefficients live on [-window, window]
    idx: np.ndarray                # entry indices, strictly increasing
    y_val: np.ndarray              # conjugated coefficients y^(p)_j per entry
    log_abs: np.ndarray            # log|y * v| per entry
    sign: np.ndarray               # sign of y * v per entry
    entry_p: np.ndarray            # which target each entry came from
    entry_n: np.ndarray            # the A_p element
    entry_j: np.ndarray            # the offset
    family: HittingFamily
    schedules: Schedules
    targets: TargetList
    dropped_leading: tuple         # per p: how many elements the filter removed

    @property
    def support_size(self) -> int:
        return int(self.idx.size)

    def to_finite_vector(self) -> FiniteVector:
        """Linear-domain copy; raises on double overflow (not underflow)."""
        out = {}
        for i in range(self.idx.size):
            la = float(self.log_abs[i])
            if la > 709.0:
                raise OverflowError(f"coefficient at {int(self.idx[i])} exceeds double range")
            out[int(self.idx[i])] = float(self.sign[i]) * math.exp(la)
        return FiniteVector(out)

    def conjugated_vector(self) -> FiniteVector:
        """The unweighted-picture coefficients x~ (exact small rationals)."""
        return FiniteVector({int(k): float(v) for k, v in zip(self.idx, self.y_val)})

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "family": {"P": self.family.P, "construction": self.family.construction,
                       "sep": self.family.sep.descriptor, "horizon": self.family.horizon},
            "schedules": self.schedules.to_config(),
            "targets": [{"p": e.p, "z": {str(k): repr(float(v)) for k, v in e.z}}
                        for e in self.targets.entries],
            "dropped_leading": list(self.dropped_leading),
            "entries": [
                {"index": int(self.idx[i]), "y": float(self.y_val[i]),
                 "sign": int(self.sign[i]), "log_abs": float(self.log_abs[i])}
                for i in range(self.idx.size)
            ],
        }


def _series_bound_log(space: SpaceModel, v: VSequence, elements: np.ndarray, p: int) -> float:
    """log of || sum_{n in A_p} v_{n+p} e_{n+p} || for the given space."""
    if elements.size == 0:
        return -math.inf
    logs = v.log_array(int(elements.min()) + p, int(elements.max()) + p)
    offset = int(elements.min()) + p
    vals = logs[elements + p - offset]
    if space.is_sup_norm:
        return float(vals.max())
    pw = space.p or 1.0
    mx = float(vals.max())
    return (mx * pw + math.log(float(np.exp(pw * (vals - mx)).sum()))) / pw


def enforce_series_bound(space: SpaceModel, w: WeightRule, family: HittingFamily,
                         schedules: Schedules, v: Optional[VSequence] = None) -> tuple:
    """Drop leading elements of each A_p until ||sum v_{n+p} e_{n+p}|| < alpha_p.

    Returns (filtered family, per-p dropped counts).  Raises if some A_p is
    exhausted before the bound holds.
    """
    if v is None:
        v = VSequence(w)
    fam = family
    dropped = []
    for p in range(1, family.P + 1):
        elements = fam.set_for(p).elements.copy()
        count = 0
        bound = schedules.alpha_log(p)
        while _series_bound_log(space, v, elements, p) >= bound:
            if elements.size <= 1:
                raise BuildError(
                    f"cannot satisfy the alpha_{p} smallness bound: dropping leading "
                    f"elements exhausted A_{p}; the v-moduli decay too slowly"
                )
            elements = elements[1:]
            count += 1
        if count:
            fam = fam.replace_set(p, IndexSet(elements, name=f"A_{p}"))
        dropped.append(count)
    return fam, tuple(dropped)


def build_vector(w: WeightRule, family: HittingFamily, targets: TargetList,
                 schedules: Schedules, window: int,
                 space: Optional[SpaceModel] = None,
                 norm_check: str = "warn") -> AHCVector:
    """Assemble the windowed hypercyclic-vector candidate.

    norm_check: "warn" runs the cheap tail-shape heuristic and warns when the
    family/weight pair looks unable to satisfy the norm criterion; "skip"
    does nothing; the full check is the caller's business (it is not run
    here because it dominates the build cost).
    """
    if space is None:
        space = SpaceModel.c0_Z()
    if targets.P > family.P:
        raise BuildError(f"family provides P = {family.P} sets but targets need {targets.P}")
    if family.max_element() + targets.P > window:
        raise BuildError(
            f"window {window} is smaller than max A_p element {family.max_element()} + p; "
            "restrict the family or enlarge the window"
        )
    violation = check_separation(family)
    if violation is not None:
        raise BuildError(f"family fails separation: {violation}")

    v = VSequence(w, -window - 1, window + 1)
    fam, dropped = enforce_series_bound(space, w, family, schedules, v)

    if norm_check == "warn":
        from .criteria import _tail_certificate, JMode
        if not _tail_certificate(w, fam, schedules.epsilon, JMode.FULL, bilateral=True):
            warnings.warn(
                "weight/family pair has no monotone-tail certificate; "
                "run check_norm_form before trusting orbit bounds",
                stacklevel=2,
            )
    elif norm_check != "skip":
        raise ValueError("norm_check must be 'warn' or 'skip'")

    idx, y_val, p_arr, n_arr, j_arr = [], [], [], [], []
    seen = {}
    for p in range(1, targets.P + 1):
        y = targets.conjugated(p)
        if not len(y):
            continue
        for n in fam.set_for(p):
            if n + p > window:
                break
            for j, yj in y:
                k = n + j
                if k in seen:
                    raise BuildError(
                        f"coefficient collision at index {k}: (p={p}, n={n}, j={j}) vs {seen[k]}; "
                        "family separation is insufficient"
                    )
                seen[k] = (p, n, j)
                idx.append(k)
                y_val.append(float(yj))
                p_arr.append(p)
                n_arr.append(n)
                j_arr.append(j)

    order = np.argsort(np.asarray(idx, dtype=np.int64), kind="stable")
    idx_a = np.asarray(idx, dtype=np.int64)[order]
    y_a = np.asarray(y_val, dtype=np.float64)[order]
    p_a = np.asarray(p_arr, dtype=np.int64)[order]
    n_a = np.asarray(n_arr, dtype=np.int64)[order]
    j_a = np.asarray(j_arr, dtype=np.int64)[order]

    if idx_a.size:
        logs_v = v.log_array(int(idx_a.min()), int(idx_a.max()))
        signs_v = v.sign_array(int(idx_a.min()), int(idx_a.max()))
        off = int(idx_a.min())
        log_abs = np.log(np.abs(y_a)) + logs_v[idx_a - off]
        sign = (np.sign(y_a) * signs_v[idx_a - off]).astype(np.int8)
    else:
        log_abs = np.array([], dtype=np.float64)
        sign = np.array([], dtype=np.int8)

    return AHCVector(window, idx_a, y_a, log_abs, sign, p_a, n_a, j_a,
                     fam, schedules, targets, dropped)
