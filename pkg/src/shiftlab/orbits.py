"""Orbit verification of the constructed vector against the proof bound.

For every q <= P and m in A_q up to the outer horizon the orbit error

    err(q, m) = || B_w^m x - z^(q) ||

is evaluated exactly on the stored window (per-entry log-domain products, no
overflow) and compared with 2^{-q} plus the reported truncation bound; the
truncation term is rigorous for weight rules with monotone v-tails and is
flagged heuristic otherwise.  Hit sets H(z^(q), eps) = {m <= outer :
err(q, m) < eps} are extracted over all shift exponents, not just A_q, and
come with density reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .builder import AHCVector
from .densities import DensityReport, IndexSet, density_report
from .spaces import SpaceModel, SpaceError
from .weights import WeightPrefix, WeightRule, moduli_ge_one_on_positive_side

__all__ = ["OrbitError", "OrbitFailure", "OrbitReport", "verify_orbit"]

_EXP_CAP = 709.0


def _safe_exp(log_value: float) -> float:
    return math.inf if log_value > _EXP_CAP else math.exp(log_value)


class OrbitError(ValueError):
    """Orbit verification could not run (window/horizon mismatch)."""


@dataclass(frozen=True)
class OrbitFailure:
    q: int
    m: int
    error: float
    bound: float
    contributors: tuple  # top offending (coordinate, p, n, j, magnitude)

    def __str__(self):
        terms = ", ".join(
            f"coord {k} (p={p}, n={n}, j={j}): {mag:.3e}" for k, p, n, j, mag in self.contributors
        )
        return (f"orbit bound exceeded at q={self.q}, m={self.m}: "
                f"error {self.error:.6e} > {self.bound:.6e}; top terms: {terms}")


@dataclass(frozen=True)
class OrbitReport:
    P: int
    outer_horizon: int
    m_values: dict       # q -> np.ndarray of checked m in A_q
    errors: dict         # q -> np.ndarray of errors
    bounds: dict         # q -> float (2^{-q})
    truncation: dict     # q -> float (max truncation bound over checked m)
    truncation_rigorous: bool
    hit_sets: dict       # q -> IndexSet
    hit_densities: dict  # q -> DensityReport
    hit_threshold: dict  # q -> float
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures

    def max_error(self, q: int) -> float:
        arr = self.errors[q]
        return float(arr.max()) if arr.size else 0.0

    def csv_rows(self):
        yield ("q", "m", "error", "bound", "truncation")
        for q in sorted(self.m_values):
            for m, e in zip(self.m_values[q], self.errors[q]):
                yield (q, int(m), repr(float(e)), repr(self.bounds[q]), repr(self.truncation[q]))

    def to_dict(self) -> dict:
        return {
            "P": self.P,
            "outer_horizon": self.outer_horizon,
            "ok": self.ok,
            "truncation_rigorous": self.truncation_rigorous,
            "per_q": {
                str(q): {
                    "checked": int(self.m_values[q].size),
                    "max_error": self.max_error(q),
                    "bound": self.bounds[q],
                    "truncation": self.truncation[q],
                    "hit_threshold": self.hit_threshold[q],
                    "hit_count": len(self.hit_sets[q]),
                    "hit_upper_density": self.hit_densities[q].upper,
                    "hit_lower_density": self.hit_densities[q].lower,
                }
                for q in sorted(self.m_values)
            },
            "failures": [str(f) for f in self.failures],
        }


class _OrbitEngine:
    """Shared arrays for evaluating || B_w^m x - z^(q) || over many m.

    (B_w^m x) at coordinate idx - m equals sign * exp(log|x_idx| + S(idx) -
    S(idx - m)) with S the cumulative log-modulus of w; everything here is a
    lookup into two prefix arrays.
    """

    def __init__(self, space: SpaceModel, w: WeightRule, x: AHCVector, outer: int):
        self.space = space
        self.x = x
        self.outer = outer
        lo = (int(x.idx.min()) if x.idx.size else 0) - outer - 2
        hi = (int(x.idx.max()) if x.idx.size else 0) + 2
        hi = max(hi, x.window + 1)
        self.prefix = WeightPrefix(w, lo, hi)
        self._S = self.prefix.cumulative
        self._off = self.prefix.lo - 1  # S index of k is k - off
        self.S_at_idx = self._S[x.idx - self._off] if x.idx.size else np.array([])
        self._pos = {int(k): i for i, k in enumerate(x.idx)}

    def entry_result_logs(self, m: int) -> np.ndarray:
        """log |(B_w^m x)_{idx - m}| for every stored entry."""
        if not self.x.idx.size:
            return np.array([])
        return self.x.log_abs + (self.S_at_idx - self._S[self.x.idx - m - self._off])

    def entry_value(self, i: int, m: int) -> float:
        """Signed linear value of (B_w^m x) at coordinate idx[i] - m."""
        la = float(self.x.log_abs[i] + self.S_at_idx[i] - self._S[int(self.x.idx[i]) - m - self._off])
        sgn = self.prefix.product_sign(int(self.x.idx[i]) - m + 1, int(self.x.idx[i])) \
            * int(self.x.sign[i])
        return sgn * _safe_exp(la)

    def error(self, m: int, z_items: list) -> float:
        """Orbit error at exponent m against the sparse target z."""
        logs = self.entry_result_logs(m)
        overlap_pos = []
        point_residuals = []
        for k, z_val in z_items:
            i = self._pos.get(k + m)
            if i is None:
                point_residuals.append(abs(float(z_val)))
            else:
                overlap_pos.append(i)
                point_residuals.append(abs(self.entry_value(i, m) - float(z_val)))
        if logs.size and overlap_pos:
            mask = np.ones(logs.size, dtype=bool)
            mask[overlap_pos] = False
            rest = logs[mask]
        else:
            rest = logs
        if self.space.is_sup_norm:
            err = max(point_residuals, default=0.0)
            if rest.size:
                err = max(err, _safe_exp(float(rest.max())))
            return err
        p = self.space.p or 1.0
        total = sum(r ** p for r in point_residuals)
        if rest.size:
            mx = float(rest.max())
            if p * mx > _EXP_CAP:
                return math.inf
            total += float(np.exp(p * (rest - mx)).sum()) * math.exp(p * mx)
        return total ** (1.0 / p)

    def max_entry_log_per_m(self, ms: np.ndarray, chunk: int = 1 << 22) -> np.ndarray:
        """max over entries of log|(B^m x)| for each m (used for empty targets)."""
        if not self.x.idx.size:
            return np.full(ms.size, -math.inf)
        out = np.empty(ms.size)
        cols = self.x.idx.size
        rows = max(1, chunk // cols)
        base = self.x.log_abs + self.S_at_idx
        for start in range(0, ms.size, rows):
            mc = ms[start:start + rows]
            out[start:start + rows] = (base[None, :]
                                       - self._S[self.x.idx[None, :] - mc[:, None] - self._off]).max(axis=1)
        return out

    def top_contributors(self, m: int, count: int = 5) -> tuple:
        logs = self.entry_result_logs(m)
        if not logs.size:
            return ()
        order = np.argsort(logs)[::-1][:count]
        return tuple(
            (int(self.x.idx[i]) - m, int(self.x.entry_p[i]), int(self.x.entry_n[i]),
             int(self.x.entry_j[i]), _safe_exp(float(logs[i])))
            for i in order
        )


def _truncation_bound(x: AHCVector, m: int, prefix: WeightPrefix) -> float:
    """Bound on the out-of-window part of the series after m shifts.

    Rigorous when |v| is non-increasing to the right (checked by the caller);
    evaluated at the first index past the stored data, clamped into the
    prefix window (which only enlarges the bound for monotone tails).
    """
    cut = min(x.window, x.family.horizon)
    k_min = min(cut + 1 - m - x.targets.P, prefix.hi)
    return _safe_exp(prefix.v_log(k_min) + math.log(max(1, x.targets.P)))


def verify_orbit(space: SpaceModel, w: WeightRule, x: AHCVector, outer_horizon: int,
                 tol: float = 1e-9, hit_eps: Optional[dict] = None) -> OrbitReport:
    """Check the orbit error bound err(q, m) <= 2^{-q} + tol + truncation.

    Also extracts the hit sets H(z^(q), eps_q) over all m <= outer_horizon:
    exponents are pre-filtered by the per-coordinate residuals on supp z^(q)
    (a necessary condition for any monotone norm), and only the candidates
    get the full error evaluation.
    """
    if not space.bilateral:
        raise SpaceError("orbit verification runs on bilateral spaces")
    if outer_horizon + x.targets.max_support() > x.window:
        raise OrbitError("outer horizon plus target support exceeds the stored window")

    engine = _OrbitEngine(space, w, x, outer_horizon)
    rigorous = moduli_ge_one_on_positive_side(w)
    m_values, errors, bounds, trunc = {}, {}, {}, {}
    hit_sets, hit_densities, hit_thresholds = {}, {}, {}
    failures = []

    for q in range(1, x.targets.P + 1):
        z_items = [(int(k), v) for k, v in x.targets.target(q)]
        Aq = x.family.set_for(q).elements
        Aq = Aq[Aq <= outer_horizon]
        errs = np.empty(Aq.size)
        tmax = 0.0
        bound = 2.0 ** (-q)
        for i, m in enumerate(Aq):
            m = int(m)
            e = engine.error(m, z_items)
            errs[i] = e
            t = _truncation_bound(x, m, engine.prefix)
            tmax = max(tmax, t)
            if e > bound + tol + t:
                failures.append(OrbitFailure(q, m, e, bound + tol + t,
                                             engine.top_contributors(m)))
        m_values[q] = Aq
        errors[q] = errs
        bounds[q] = bound
        trunc[q] = tmax

        threshold = (hit_eps or {}).get(q, bound + tol + tmax)
        hit = _hit_set(engine, z_items, threshold, outer_horizon, Aq, errs)
        hit_sets[q] = hit
        hit_densities[q] = density_report(hit, max(outer_horizon, 10))
        hit_thresholds[q] = threshold

    return OrbitReport(x.targets.P, outer_horizon, m_values, errors, bounds, trunc,
                       rigorous, hit_sets, hit_densities, hit_thresholds, tuple(failures))


def _hit_set(engine: _OrbitEngine, z_items: list, threshold: float, outer: int,
             Aq: np.ndarray, known_errs: np.ndarray) -> IndexSet:
    """All m <= outer with orbit error below the threshold."""
    known = {int(m): float(e) for m, e in zip(Aq, known_errs)}
    if z_items:
        candidates = _candidates_by_support(engine, z_items, threshold, outer)
        hits = []
        for m in candidates:
            m = int(m)
            e = known.get(m)
            if e is None:
                e = engine.error(m, z_items)
            if e < threshold:
                hits.append(m)
        return IndexSet(hits)
    # zero target: the error is just the largest surviving entry magnitude
    ms = np.arange(0, outer + 1, dtype=np.int64)
    if threshold <= 0:
        return IndexSet([])
    top = engine.max_entry_log_per_m(ms)
    return IndexSet(ms[top < math.log(threshold)])


def _candidates_by_support(engine: _OrbitEngine, z_items: list, threshold: float,
                           outer: int) -> np.ndarray:
    """Exponents whose target-support residuals alone stay below threshold."""
    x = engine.x
    ms = np.arange(0, outer + 1, dtype=np.int64)
    ok = np.ones(ms.size, dtype=bool)
    for k, z_val in z_items:
        want = k + ms  # entry index landing on coordinate k after m shifts
        if x.idx.size:
            pos = np.searchsorted(x.idx, want)
            inside = pos < x.idx.size
            found = inside & (x.idx[np.minimum(pos, x.idx.size - 1)] == want)
        else:
            found = np.zeros(ms.size, dtype=bool)
        vals = np.zeros(ms.size)
        if found.any():
            ip = pos[found]
            mf = ms[found]
            logs = (x.log_abs[ip] + engine.S_at_idx[ip]
                    - engine._S[x.idx[ip] - mf - engine._off])
            with np.errstate(over="ignore"):
                mags = np.exp(np.minimum(logs, _EXP_CAP + 1))
            signs = engine.prefix.product_sign_array(x.idx[ip] - mf + 1, x.idx[ip]) \
                * x.sign[ip].astype(np.int64)
            vals[found] = signs * mags
        ok &= np.abs(vals - float(z_val)) < threshold
    return ms[ok]
