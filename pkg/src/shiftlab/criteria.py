"""Finite-horizon evaluation of the shift hypercyclicity criteria.

Two equivalent routes are implemented for bilateral shifts and kept
deliberately separate so that one can oracle-check the other:

* the norm form: for every p, q <= P, m in A_q and admissible j, the space
  norm of sum_{n in A_p, n != m} v_{n-m+j} e_{n-m+j} must fall strictly
  below min(eps_p, eps_q);

* the c0 product form: under the separation |n - m| > p + q the same sum
  splits by the sign of n - m into a backward weight product
  prod_{nu=n-m+j+1}^{0} |w_nu| (required < min eps) for n < m and a forward
  product prod_{nu=1}^{n-m+j} |w_nu| (required > 1/min eps) for n > m.

Unilateral shifts get the one-sided variant (j = 0..p, only n > m), and the
lower-density route additionally exposes the growth condition
w_1...w_{n+p} -> infinity along A_p.

All comparisons run in log domain with recorded margins.  Verdicts are
horizon-qualified: `Violated` comes with a reproducible witness and is
stable under horizon growth; a clean pass is `SatisfiedToHorizon` when the
unchecked inner tail can be excluded by a monotone v-tail bound, and
`InconclusiveTail` otherwise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .families import HittingFamily, check_separation, FamilyError
from .schedules import EpsilonSchedule
from .spaces import SpaceModel, SpaceError
from .weights import (
    WeightError,
    WeightPrefix,
    WeightRule,
    invert_reflect,
    moduli_ge_one_on_positive_side,
    moduli_le_one_on_nonpositive_side,
    weight_product_exact,
)

__all__ = [
    "Verdict",
    "JMode",
    "Witness",
    "PairExtremum",
    "CheckHorizons",
    "CriterionReport",
    "check_norm_form",
    "check_c0_products",
    "check_unilateral",
    "reevaluate_witness",
    "GrowthVerdict",
    "GrowthEntry",
    "GrowthReport",
    "check_frequent_growth",
    "SymmetryReport",
    "SymmetryMismatchError",
    "symmetry_check",
]

MARGIN_FLAG = 1e-9  # log-margins below this are flagged numerically marginal


class Verdict(Enum):
    SATISFIED_TO_HORIZON = "SatisfiedToHorizon"
    VIOLATED = "Violated"
    INCONCLUSIVE_TAIL = "InconclusiveTail"


class JMode(Enum):
    FULL = "full"            # j = -p..p
    ZERO = "zero"            # j = 0 (invertible shifts only)
    UNILATERAL = "unilateral"  # j = 0..p

    def offsets(self, p: int) -> range:
        if self is JMode.FULL:
            return range(-p, p + 1)
        if self is JMode.ZERO:
            return range(0, 1)
        return range(0, p + 1)


@dataclass(frozen=True)
class Witness:
    """A reproducible offending tuple: re-evaluating (p, q, m, j) recovers it."""

    p: int
    q: int
    m: int
    n: int
    j: int
    log_value: float   # log of the offending norm/product
    log_bound: float   # log min(eps_p, eps_q)
    value_kind: str    # "norm" | "backward_product" | "forward_product"

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def key(self) -> tuple:
        return (self.p, self.q, self.m, self.n, self.j)

    def to_dict(self) -> dict:
        return {
            "p": self.p, "q": self.q, "m": self.m, "n": self.n, "j": self.j,
            "log_value": self.log_value, "value": self.value,
            "log_bound": self.log_bound, "kind": self.value_kind,
        }


@dataclass(frozen=True)
class PairExtremum:
    """Per-(p, q) extremal criterion value over all checked (m, j)."""

    p: int
    q: int
    max_log_value: float
    at_m: int
    at_j: int
    min_log_margin: float
    marginal_count: int
    tuples_checked: int

    def to_row(self) -> tuple:
        value = math.exp(self.max_log_value) if self.max_log_value < 700 else math.inf
        return (self.p, self.q, repr(self.max_log_value), repr(value),
                self.at_m, self.at_j, repr(self.min_log_margin),
                self.marginal_count, self.tuples_checked)


@dataclass(frozen=True)
class CheckHorizons:
    """outer bounds the shift exponents m; inner bounds the summation index n."""

    outer: int
    inner: int

    def __post_init__(self):
        if self.outer < 1 or self.inner < 1:
            raise ValueError("horizons must be positive")

    def to_config(self) -> dict:
        return {"outer": self.outer, "inner": self.inner}


@dataclass(frozen=True)
class CriterionReport:
    verdict: Verdict
    witness: Optional[Witness]
    pair_extrema: tuple  # of PairExtremum, (p, q) ascending
    horizons: CheckHorizons
    j_mode: JMode
    form: str
    space_variant: str
    P: int
    certified_tail: bool = False
    marginal_total: int = 0

    @property
    def exit_code(self) -> int:
        return {"SatisfiedToHorizon": 0, "Violated": 1, "InconclusiveTail": 2}[self.verdict.value]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "witness": self.witness.to_dict() if self.witness else None,
            "form": self.form,
            "space": self.space_variant,
            "P": self.P,
            "j_mode": self.j_mode.value,
            "horizons": self.horizons.to_config(),
            "certified_tail": self.certified_tail,
            "marginal_total": self.marginal_total,
            "exit_code": self.exit_code,
        }

    def extrema_csv_rows(self):
        yield ("p", "q", "max_log_value", "max_value", "at_m", "at_j",
               "min_log_margin", "marginal_count", "tuples_checked")
        for e in self.pair_extrema:
            yield e.to_row()


# ---------------------------------------------------------------------------
# shared scaffolding


def _validated_family(family: HittingFamily, horizons: CheckHorizons) -> None:
    if family.horizon < max(horizons.outer, horizons.inner):
        raise FamilyError("family horizon must cover the criterion horizons")
    violation = check_separation(family)
    if violation is not None:
        raise FamilyError(f"family fails separation: {violation}")


def _criterion_prefix(w: WeightRule, horizons: CheckHorizons, P: int) -> WeightPrefix:
    lo = -(horizons.outer + P) - 1
    hi = horizons.inner + P + 1
    return WeightPrefix(w, lo, hi)


def _effective_sep(family: HittingFamily, p: int, q: int) -> int:
    return max(p + q + 1, family.sep(p, q))


def _tail_certificate(w: WeightRule, family: HittingFamily, eps: EpsilonSchedule,
                      j_mode: JMode, bilateral: bool) -> bool:
    """Can the unchecked n-tail (n beyond the inner horizon) be excluded?

    Requires |v_k| non-increasing in |k| on the relevant side(s), which holds
    when |w_nu| >= 1 for nu >= 1 (positive side) and |w_nu| <= 1 for nu <= 0
    (negative side), together with the boundary values at the minimal
    admissible offsets falling below the schedule.  The predicate is
    symmetric under weight reflection, matching the criterion itself.
    """
    if not moduli_ge_one_on_positive_side(w):
        return False
    if bilateral and not moduli_le_one_on_nonpositive_side(w):
        return False
    P = family.P
    boundaries = {}
    for p in range(1, P + 1):
        for q in range(1, P + 1):
            k0 = _effective_sep(family, p, q)
            if j_mode is JMode.FULL:
                k0 -= p
            if k0 < 1:
                return False
            boundaries[(p, q)] = k0
    k_max = max(boundaries.values())
    prefix = WeightPrefix(w, -k_max - 1, k_max + 1)
    for (p, q), k0 in boundaries.items():
        bound = eps.min_log(p, q)
        if prefix.v_log(k0) >= bound:
            return False
        if bilateral and prefix.v_log(-k0) >= bound:
            return False
    return True


@dataclass
class _PairScan:
    """Violation and extremum bookkeeping for one (p, q) block."""

    p: int
    q: int
    max_log: float = -math.inf
    at_m: int = 0
    at_j: int = 0
    min_margin: float = math.inf
    marginal: int = 0
    tuples: int = 0
    first_violation: Optional[tuple] = None  # (m_pos, j_pos, m, j, n, log_value)

    def extremum(self) -> PairExtremum:
        return PairExtremum(self.p, self.q, self.max_log, self.at_m, self.at_j,
                            self.min_margin, self.marginal, self.tuples)


def _scan_pair(logv_at, Ap: np.ndarray, Am: np.ndarray, same_set: bool,
               j_values, log_bound: float, aggregate: str, lp_power: float = 1.0,
               chunk: int = 1 << 22) -> _PairScan:
    """Evaluate one (p, q) block over all (m, j); n runs along Ap.

    `logv_at` maps an int array of offsets k = n - m + j to log|v_k|.
    aggregate: "max" (sup norms) or "lp" (p-th power log-sum-exp).
    Iteration order is m ascending then j ascending; within a violating
    (m, j) the witness n is the largest contributor (ties to the smallest n).
    """
    scan = _PairScan(0, 0)
    if Ap.size == 0 or Am.size == 0:
        return scan
    rows_per_chunk = max(1, chunk // max(1, Ap.size))
    for start in range(0, Am.size, rows_per_chunk):
        Mc = Am[start:start + rows_per_chunk]
        base = Ap[None, :].astype(np.int64) - Mc[:, None].astype(np.int64)  # n - m
        excl = (Ap[None, :] == Mc[:, None]) if same_set else None
        for j in j_values:
            K = base + j
            LV = logv_at(K)
            if excl is not None:
                LV = np.where(excl, -np.inf, LV)
            if aggregate == "max":
                vals = LV.max(axis=1)
                argn = LV.argmax(axis=1)
            else:
                with np.errstate(over="ignore", divide="ignore"):
                    shifted = lp_power * LV
                    mx = shifted.max(axis=1)
                    safe_mx = np.where(np.isfinite(mx), mx, 0.0)
                    s = np.exp(shifted - safe_mx[:, None]).sum(axis=1)
                    vals = np.where(np.isfinite(mx), (safe_mx + np.log(s)) / lp_power, -np.inf)
                argn = LV.argmax(axis=1)
            margins = log_bound - vals
            scan.tuples += int(vals.size)
            scan.marginal += int((np.abs(margins) < MARGIN_FLAG).sum())
            mmin = float(margins.min())
            if mmin < scan.min_margin:
                scan.min_margin = mmin
            vmax_pos = int(vals.argmax())
            if float(vals[vmax_pos]) > scan.max_log:
                scan.max_log = float(vals[vmax_pos])
                scan.at_m = int(Mc[vmax_pos])
                scan.at_j = j
            bad = np.nonzero(vals >= log_bound)[0]
            if bad.size:
                r = int(bad[0])
                m_pos = start + r
                j_pos = j
                cand = (m_pos, j_pos, int(Mc[r]), j, int(Ap[argn[r]]), float(vals[r]))
                if scan.first_violation is None or (cand[0], cand[1]) < (scan.first_violation[0], scan.first_violation[1]):
                    scan.first_violation = cand
    return scan


def _run_check(space: SpaceModel, w: WeightRule, family: HittingFamily,
               eps: EpsilonSchedule, horizons: CheckHorizons, j_mode: JMode,
               form: str, value_kind_for, logv_at_factory, threads: int = 1,
               unilateral: bool = False) -> CriterionReport:
    P = family.P
    if eps.P < P:
        raise ValueError(f"schedule has {eps.P} values but the family has P = {P}")
    _validated_family(family, horizons)
    prefix = _criterion_prefix(w, horizons, P)
    logv_at = logv_at_factory(prefix)

    def scan_block(pq):
        # under the separation invariant only n > m can reach offsets k >= 1,
        # so the unilateral n > m restriction is realized inside logv_at
        p, q = pq
        Ap_all = family.set_for(p).elements
        Ap = Ap_all[Ap_all <= horizons.inner]
        Aq_all = family.set_for(q).elements
        Am = Aq_all[Aq_all <= horizons.outer]
        scan = _scan_pair(logv_at, Ap, Am, p == q, j_mode.offsets(p),
                          eps.min_log(p, q),
                          "max" if space.is_sup_norm else "lp",
                          lp_power=space.p or 1.0)
        scan.p, scan.q = p, q
        return scan

    blocks = [(p, q) for p in range(1, P + 1) for q in range(1, P + 1)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scans = list(pool.map(scan_block, blocks))
    else:
        scans = [scan_block(pq) for pq in blocks]

    witness = None
    for scan in scans:  # blocks are (p, q) ascending: first violation is lex-first
        if scan.first_violation is not None:
            _, _, m, j, n, log_value = scan.first_violation
            witness = Witness(scan.p, scan.q, m, n, j, log_value,
                              eps.min_log(scan.p, scan.q),
                              value_kind_for(n, m, j))
            break

    extrema = tuple(s.extremum() for s in scans)
    marginal_total = sum(s.marginal for s in scans)
    if witness is not None:
        verdict, certified = Verdict.VIOLATED, False
    else:
        certified = space.is_sup_norm and _tail_certificate(
            w, family, eps, j_mode, bilateral=not unilateral)
        verdict = Verdict.SATISFIED_TO_HORIZON if certified else Verdict.INCONCLUSIVE_TAIL
    return CriterionReport(verdict, witness, extrema, horizons, j_mode, form,
                           space.variant, P, certified, marginal_total)


# ---------------------------------------------------------------------------
# the three checkers


def _norm_factory(prefix: WeightPrefix):
    span_lo = prefix.lo
    table = prefix.v_log_array(prefix.lo, prefix.hi)

    def logv_at(K: np.ndarray) -> np.ndarray:
        return table[K - span_lo]

    return logv_at


def _product_factory(prefix: WeightPrefix):
    # S-array differences: backward log-product for k < 0 is S(0)-S(k); the
    # forward condition for k > 0 flips to -(S(k)-S(0)) < log eps.
    span_lo = prefix.lo
    S = prefix.cumulative

    def split_log_at(K: np.ndarray) -> np.ndarray:
        i0 = 0 - span_lo + 1
        return S[i0] - S[K - span_lo + 1]

    return split_log_at


def _unilateral_factory(prefix: WeightPrefix):
    span_lo = prefix.lo
    S = prefix.cumulative

    def recip_forward_log_at(K: np.ndarray) -> np.ndarray:
        i0 = 0 - span_lo + 1
        out = S[i0] - S[K - span_lo + 1]  # log 1/prod_{1}^{k} |w|
        return np.where(K >= 1, out, -np.inf)  # n <= m never contributes

    return recip_forward_log_at


_FORM_FACTORIES = {
    "norm": _norm_factory,
    "c0_products": _product_factory,
    "unilateral": _unilateral_factory,
}


def check_norm_form(space: SpaceModel, w: WeightRule, family: HittingFamily,
                    eps: EpsilonSchedule, horizons: CheckHorizons,
                    j_mode: JMode = JMode.FULL, threads: int = 1) -> CriterionReport:
    """The norm-form criterion on a bilateral space."""
    if not space.bilateral:
        raise SpaceError("check_norm_form is the bilateral criterion; use check_unilateral")
    if j_mode is JMode.UNILATERAL:
        raise ValueError("j_mode 'unilateral' belongs to check_unilateral")
    if j_mode is JMode.ZERO and not w.invertible:
        raise WeightError("the j = 0 reduction requires an invertible weight rule")
    return _run_check(space, w, family, eps, horizons, j_mode, "norm",
                      lambda n, m, j: "norm", _norm_factory, threads=threads)


def check_c0_products(w: WeightRule, family: HittingFamily, eps: EpsilonSchedule,
                      horizons: CheckHorizons, j_mode: JMode = JMode.FULL,
                      threads: int = 1) -> CriterionReport:
    """The split product form of the c0(Z) criterion.

    For n < m the backward product prod_{nu=n-m+j+1}^{0} |w_nu| must fall
    below min(eps_p, eps_q); for n > m the forward product
    prod_{nu=1}^{n-m+j} |w_nu| must exceed 1/min(eps_p, eps_q).  Both are
    the statement `log(product toward the offset) < log min eps` once pulled
    to the offset's side, which is how the scan evaluates them.
    """
    if j_mode is JMode.UNILATERAL:
        raise ValueError("j_mode 'unilateral' belongs to check_unilateral")
    if j_mode is JMode.ZERO and not w.invertible:
        raise WeightError("the j = 0 reduction requires an invertible weight rule")

    def kind(n, m, j):
        return "backward_product" if n < m else "forward_product"

    return _run_check(SpaceModel.c0_Z(), w, family, eps, horizons, j_mode,
                      "c0_products", kind, _product_factory, threads=threads)


def check_unilateral(space: SpaceModel, w: WeightRule, family: HittingFamily,
                     eps: EpsilonSchedule, horizons: CheckHorizons,
                     threads: int = 1) -> CriterionReport:
    """The unilateral criterion: j = 0..p and only n > m contribute."""
    if space.bilateral:
        raise SpaceError("check_unilateral needs a sequence space over N_0")
    return _run_check(space, w, family, eps, horizons, JMode.UNILATERAL,
                      "unilateral", lambda n, m, j: "forward_product",
                      _unilateral_factory, threads=threads, unilateral=True)


def reevaluate_witness(space: SpaceModel, w: WeightRule, family: HittingFamily,
                       horizons: CheckHorizons, report: CriterionReport) -> float:
    """Recompute the criterion value of the report's witness tuple.

    For a Violated report the returned log-value reproduces the witness's
    offending value (bit-equal at the original horizons, and still violating
    at any larger ones).
    """
    wit = report.witness
    if wit is None:
        raise ValueError("report has no witness to re-evaluate")
    prefix = _criterion_prefix(w, horizons, family.P)
    logv_at = _FORM_FACTORIES[report.form](prefix)
    Ap = family.set_for(wit.p).elements
    Ap = Ap[Ap <= horizons.inner]
    K = Ap.astype(np.int64) - wit.m + wit.j
    LV = logv_at(K)
    if wit.p == wit.q:
        LV = np.where(Ap == wit.m, -np.inf, LV)
    if space.is_sup_norm:
        return float(LV.max())
    pw = space.p or 1.0
    mx = float(LV.max())
    if not math.isfinite(mx):
        return -math.inf
    return (pw * mx + math.log(float(np.exp(pw * (LV - mx)).sum()))) / pw


# ---------------------------------------------------------------------------
# growth condition (the lower-density route)


class GrowthVerdict(Enum):
    GROWTH_OBSERVED = "GrowthObservedToHorizon"
    VIOLATED = "ViolatedToHorizon"


@dataclass(frozen=True)
class GrowthEntry:
    p: int
    verdict: GrowthVerdict
    tail_min_log: float
    lagging_n: Optional[int]
    thresholds: tuple

    def to_dict(self) -> dict:
        return {"p": self.p, "verdict": self.verdict.value,
                "tail_min_log": self.tail_min_log, "lagging_n": self.lagging_n,
                "thresholds": list(self.thresholds)}


@dataclass(frozen=True)
class GrowthReport:
    entries: tuple
    horizons: CheckHorizons

    @property
    def verdict(self) -> GrowthVerdict:
        bad = any(e.verdict is GrowthVerdict.VIOLATED for e in self.entries)
        return GrowthVerdict.VIOLATED if bad else GrowthVerdict.GROWTH_OBSERVED

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict is GrowthVerdict.GROWTH_OBSERVED else 1

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value,
                "entries": [e.to_dict() for e in self.entries],
                "horizons": self.horizons.to_config()}


def check_frequent_growth(w: WeightRule, family: HittingFamily, horizons: CheckHorizons,
                          thresholds=(1.0, 10.0, 100.0)) -> GrowthReport:
    """Evaluate w_1...w_{n+p} -> infinity along each A_p, horizon-qualified.

    The verdict per p is GrowthObservedToHorizon when the running minimum of
    log|w_1...w_{n+p}| over the tail half of the checked range exceeds every
    threshold; divergence itself is not decidable at a finite horizon.
    """
    if not thresholds:
        raise ValueError("at least one growth threshold is required")
    _validated_family(family, horizons)
    P = family.P
    prefix = WeightPrefix(w, 0, horizons.outer + P + 1)
    entries = []
    for p in range(1, P + 1):
        A = family.set_for(p).elements
        A = A[A <= horizons.outer]
        logs = np.array([prefix.product_log(1, int(n) + p) for n in A])
        tail_from = A[-1] // 2 if A.size else 0
        tail_mask = A >= tail_from
        tail_logs = logs[tail_mask]
        tail_ns = A[tail_mask]
        tmin = float(tail_logs.min()) if tail_logs.size else -math.inf
        lagging = int(tail_ns[int(tail_logs.argmin())]) if tail_logs.size else None
        ok = all(tmin > math.log(t) for t in thresholds)
        entries.append(GrowthEntry(
            p,
            GrowthVerdict.GROWTH_OBSERVED if ok else GrowthVerdict.VIOLATED,
            tmin,
            None if ok else lagging,
            tuple(float(t) for t in thresholds),
        ))
    return GrowthReport(tuple(entries), horizons)


# ---------------------------------------------------------------------------
# reflection symmetry


@dataclass(frozen=True)
class SymmetryReport:
    equal: bool
    verdict: Verdict
    reflected_verdict: Verdict
    identity_max_relative_error: float
    identity_checked_upto: int
    report: CriterionReport
    reflected_report: CriterionReport

    def to_dict(self) -> dict:
        return {
            "equal": self.equal,
            "verdict": self.verdict.value,
            "reflected_verdict": self.reflected_verdict.value,
            "identity_max_relative_error": self.identity_max_relative_error,
            "identity_checked_upto": self.identity_checked_upto,
        }


class SymmetryMismatchError(AssertionError):
    """Zero-mode verdicts differ under weight reflection: implementation bug."""

    def __init__(self, report: SymmetryReport):
        super().__init__(
            f"reflection symmetry mismatch: {report.verdict.value} vs "
            f"{report.reflected_verdict.value}"
        )
        self.report = report


def symmetry_check(w: WeightRule, family: HittingFamily, eps: EpsilonSchedule,
                   horizons: CheckHorizons, identity_upto: Optional[int] = None,
                   exact_upto: int = 0, threads: int = 1) -> SymmetryReport:
    """Verify invariance of the zero-mode product criterion under reflection.

    Runs the c0 product check for w and for w'_n = 1/w_{-n+1} and requires
    identical verdicts (a mismatch raises: it falsifies the implementation,
    not the characterization).  Also asserts the underlying identity
    prod_{nu=1}^{k} |w'_nu| * prod_{mu=-k+1}^{0} |w_mu| = 1 directly.
    """
    if not w.invertible:
        raise WeightError("symmetry check requires an invertible weight rule")
    w_ref = invert_reflect(w)
    r1 = check_c0_products(w, family, eps, horizons, JMode.ZERO, threads=threads)
    r2 = check_c0_products(w_ref, family, eps, horizons, JMode.ZERO, threads=threads)

    upto = identity_upto if identity_upto is not None else min(horizons.outer, 10**4)
    pw = WeightPrefix(w, -upto, 1)
    pw_ref = WeightPrefix(w_ref, 0, upto + 1)
    max_rel = 0.0
    for k in range(1, upto + 1):
        lhs = pw_ref.product_log(1, k)          # log prod |w'_{1..k}|
        rhs = -pw.product_log(-k + 1, 0)        # -log prod |w_{-k+1..0}|
        err = abs(lhs - rhs) / max(1.0, abs(rhs))
        if err > max_rel:
            max_rel = err
    for k in range(1, exact_upto + 1):
        # prod w'_{1..k} * prod w_{-k+1..0} telescopes to exactly 1
        identity = weight_product_exact(w_ref, 1, k) * weight_product_exact(w, -k + 1, 0)
        if identity != 1:
            raise SymmetryMismatchError(SymmetryReport(
                False, r1.verdict, r2.verdict, math.inf, k, r1, r2))

    equal = r1.verdict == r2.verdict
    report = SymmetryReport(equal, r1.verdict, r2.verdict, max_rel, upto, r1, r2)
    if not equal:
        raise SymmetryMismatchError(report)
    return report
