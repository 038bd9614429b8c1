"""Powers of the weighted backward shift and of its forward inverse.

The backward shift maps (x_n) to (w_{n+1} x_{n+1}); its m-th power is

    (B_w^m x)_n = (w_{n+1} ... w_{n+m}) x_{n+m},

so support moves left by m.  The forward shift F_{1/w} maps (x_n) to
((1/w_n) x_{n-1}) and inverts B_w when the weights are bounded away from 0.

Exact rational inputs go through exact Fraction products (small windows);
float inputs go through log-domain per-entry products so that no
intermediate product ever overflows.
"""

from __future__ import annotations

import math
from typing import Optional

from .spaces import FiniteVector
from .weights import WeightError, WeightRule, weight_product, weight_product_exact

__all__ = ["apply_shift_power", "apply_forward_power"]


def _use_exact(x: FiniteVector, exact: Optional[bool]) -> bool:
    return x.is_exact() if exact is None else exact


def apply_shift_power(w: WeightRule, m: int, x: FiniteVector, exact: Optional[bool] = None) -> FiniteVector:
    """B_w^m x for m >= 0; m = 0 is the identity."""
    if m < 0:
        raise ValueError("shift power must be nonnegative")
    if m == 0:
        return x
    out = {}
    if _use_exact(x, exact):
        for s, val in x.entries.items():
            out[s - m] = weight_product_exact(w, s - m + 1, s) * val
    else:
        for s, val in x.entries.items():
            prod = weight_product(w, s - m + 1, s)
            if val == 0:
                continue
            sign = prod.sign * (1 if val > 0 else -1)
            out[s - m] = sign * math.exp(prod.log_abs + math.log(abs(val)))
    return FiniteVector(out)


def apply_forward_power(w: WeightRule, m: int, x: FiniteVector, exact: Optional[bool] = None) -> FiniteVector:
    """F_{1/w}^m x, the m-th power of the inverse of B_w; rejects non-invertible w."""
    if m < 0:
        raise ValueError("shift power must be nonnegative")
    if not w.invertible:
        raise WeightError("forward shift needs an invertible weight rule")
    if m == 0:
        return x
    out = {}
    if _use_exact(x, exact):
        for s, val in x.entries.items():
            out[s + m] = val / weight_product_exact(w, s + 1, s + m)
    else:
        for s, val in x.entries.items():
            prod = weight_product(w, s + 1, s + m)
            sign = prod.sign * (1 if val > 0 else -1)
            out[s + m] = sign * math.exp(math.log(abs(val)) - prod.log_abs)
    return FiniteVector(out)
