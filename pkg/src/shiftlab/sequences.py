"""The conjugating sequence v of a weight rule.

    v_n = 1/(w_1 ... w_n)   for n > 0
    v_0 = 1
    v_n = w_{n+1} ... w_0   for n < 0

v conjugates the weighted backward shift on X to the unweighted shift on the
v-weighted copy of X.  Values are cached in log domain over an explicit
window; reads outside the window extend it (never silently return zeros).
The two cumulative arrays are anchored at index 0, so extending the window
never changes a cached value.
"""

from __future__ import annotations

import threading
from fractions import Fraction

import numpy as np

from .logdomain import LogScalar
from .weights import WeightRule, weight_product_exact

__all__ = ["VSequence", "WindowError", "v_at"]


class WindowError(IndexError):
    """A cached sequence was read outside its valid window."""


class VSequence:
    """Cached log-domain values of v over a window [lo, hi] containing 0.

    The cache is append-only: values at already-covered indices are bit-stable
    under window extension.  Instances are safe to share across threads.
    """

    def __init__(self, rule: WeightRule, lo: int = -64, hi: int = 64):
        if lo > 0 or hi < 0:
            raise ValueError("window must contain 0")
        self.rule = rule
        self._lock = threading.Lock()
        self._build(lo, hi)

    def _build(self, lo: int, hi: int) -> None:
        # right side: R[i] = log|v_i| = -sum_{nu=1}^{i} log|w_nu|, i = 0..hi
        logs_r = self.rule.descriptor.log_abs_array(1, max(hi, 1))
        negs_r = self.rule.descriptor.neg_array(1, max(hi, 1))
        self._R = np.concatenate(([0.0], -np.cumsum(logs_r)))
        self._Rneg = np.concatenate(([0], np.cumsum(negs_r)))
        # left side: L[j] = log|v_{-j}| = sum_{nu=-j+1}^{0} log|w_nu|, j = 0..-lo
        span = max(-lo, 1)
        logs_l = self.rule.descriptor.log_abs_array(-span + 1, 0)[::-1]
        negs_l = self.rule.descriptor.neg_array(-span + 1, 0)[::-1]
        self._L = np.concatenate(([0.0], np.cumsum(logs_l)))
        self._Lneg = np.concatenate(([0], np.cumsum(negs_l)))
        self._lo, self._hi = lo, hi

    @property
    def window(self) -> tuple[int, int]:
        return (self._lo, self._hi)

    def extend(self, lo: int, hi: int) -> None:
        """Grow the window to cover [lo, hi]; existing values are unchanged."""
        with self._lock:
            if lo >= self._lo and hi <= self._hi:
                return
            self._build(min(lo, self._lo), max(hi, self._hi))

    def ensure(self, lo: int, hi: int) -> None:
        if lo < self._lo or hi > self._hi:
            self.extend(lo, hi)

    def log_at(self, n: int) -> LogScalar:
        n = int(n)
        self.ensure(min(n, self._lo), max(n, self._hi))
        if n >= 0:
            neg = int(self._Rneg[n])
            return LogScalar(-1 if neg % 2 else 1, float(self._R[n]))
        neg = int(self._Lneg[-n])
        return LogScalar(-1 if neg % 2 else 1, float(self._L[-n]))

    def at(self, n: int) -> float:
        """Linear-domain v_n; raises OverflowError rather than returning inf."""
        try:
            return self.log_at(n).to_float()
        except OverflowError as exc:
            raise OverflowError(f"v_{n} exceeds double range; use log_at") from exc

    def exact_at(self, n: int) -> Fraction:
        """Exact rational v_n, computed directly from the weight products."""
        n = int(n)
        if n == 0:
            return Fraction(1)
        if n > 0:
            return 1 / weight_product_exact(self.rule, 1, n)
        return weight_product_exact(self.rule, n + 1, 0)

    def log_array(self, lo: int, hi: int) -> np.ndarray:
        """log|v_k| for k in [lo, hi]."""
        self.ensure(lo, hi)
        out = np.empty(hi - lo + 1)
        if hi >= 0:
            a = max(lo, 0)
            out[a - lo:] = self._R[a: hi + 1]
        if lo < 0:
            b = min(hi, -1)
            out[: b - lo + 1] = self._L[-lo: -b - 1: -1]
        return out

    def sign_array(self, lo: int, hi: int) -> np.ndarray:
        self.ensure(lo, hi)
        neg = np.empty(hi - lo + 1, dtype=np.int64)
        if hi >= 0:
            a = max(lo, 0)
            neg[a - lo:] = self._Rneg[a: hi + 1]
        if lo < 0:
            b = min(hi, -1)
            neg[: b - lo + 1] = self._Lneg[-lo: -b - 1: -1]
        return np.where(neg % 2, -1, 1).astype(np.int64)


def v_at(v: VSequence, n: int) -> float:
    """Linear-domain value of the conjugating sequence at index n."""
    return v.at(n)
