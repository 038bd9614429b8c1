"""Weight sequences w : Z -> nonzero reals.

A weight rule is an evaluable descriptor together with analytically declared
modulus bounds sup|w_n| and inf|w_n|.  The bounds are part of the contract:
invertibility of the shift and the operator-norm bound M used by the
construction schedules are read off them, so they are computed per descriptor
(or declared explicitly for opaque callables), never sampled.

Supported descriptors:

    constant(c)                w_n = c
    two_sided(plus, minus)     w_n = plus for n >= 1, minus for n <= 0
    periodic(values)           w_n = values[n mod L]
    table(entries, default)    finitely many overrides on top of another rule
    product(factors)           pointwise product of rules
    callable(fn, bounds)       opaque escape hatch, not serializable

Parameters are kept as exact Fractions so that the rational oracle mode is
exact by construction; log-domain evaluation goes through `log_abs`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional

import numpy as np

from .logdomain import LogScalar, log_abs

__all__ = [
    "WeightError",
    "WeightRule",
    "constant_weight",
    "two_sided_weight",
    "periodic_weight",
    "table_weight",
    "product_weight",
    "callable_weight",
    "unweighted",
    "weight_product",
    "weight_product_exact",
    "invert_reflect",
    "WeightPrefix",
    "weight_rule_to_config",
    "weight_rule_from_config",
]


class WeightError(ValueError):
    """Invalid weight rule or weight evaluation outside declared bounds."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise WeightError(f"cannot interpret {x!r} as an exact scalar")


def _check_nonzero(x: Fraction, where: str) -> Fraction:
    if x == 0:
        raise WeightError(f"zero weight in {where}; weights must be nonzero")
    return x


def _fraction_str(x: Fraction) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class _Constant:
    value: Fraction
    kind = "constant"

    def value_at(self, n: int) -> Fraction:
        return self.value

    def sup_abs(self) -> Fraction:
        return abs(self.value)

    def inf_abs(self) -> Fraction:
        return abs(self.value)

    def log_abs_array(self, lo: int, hi: int) -> np.ndarray:
        return np.full(hi - lo + 1, log_abs(self.value))

    def neg_array(self, lo: int, hi: int) -> np.ndarray:
        return np.full(hi - lo + 1, self.value < 0, dtype=np.int64)

    def reflected(self) -> "_Constant":
        return _Constant(1 / self.value)

    def moduli_ge_one_plus(self) -> bool:
        return abs(self.value) >= 1

    def moduli_le_one_minus(self) -> bool:
        return abs(self.value) <= 1

    def to_config(self) -> dict:
        return {"kind": "constant", "value": _fraction_str(self.value)}


@dataclass(frozen=True)
class _TwoSided:
    plus: Fraction   # n >= 1
    minus: Fraction  # n <= 0
    kind = "two_sided"

    def value_at(self, n: int) -> Fraction:
        return self.plus if n >= 1 else self.minus

    def sup_abs(self) -> Fraction:
        return max(abs(self.plus), abs(self.minus))

    def inf_abs(self) -> Fraction:
        return min(abs(self.plus), abs(self.minus))

    def log_abs_array(self, lo: int, hi: int) -> np.ndarray:
        idx = np.arange(lo, hi + 1)
        return np.where(idx >= 1, log_abs(self.plus), log_abs(self.minus))

    def neg_array(self, lo: int, hi: int) -> np.ndarray:
        idx = np.arange(lo, hi + 1)
        return np.where(idx >= 1, self.plus < 0, self.minus < 0).astype(np.int64)

    def reflected(self) -> "_TwoSided":
        # w'_n = 1/w_{-n+1}: n >= 1 hits indices <= 0, n <= 0 hits indices >= 1
        return _TwoSided(1 / self.minus, 1 / self.plus)

    def moduli_ge_one_plus(self) -> bool:
        return abs(self.plus) >= 1

    def moduli_le_one_minus(self) -> bool:
        return abs(self.minus) <= 1

    def to_config(self) -> dict:
        return {
            "kind": "two_sided",
            "plus": _fraction_str(self.plus),
            "minus": _fraction_str(self.minus),
        }


@dataclass(frozen=True)
class _Periodic:
    values: tuple
    kind = "periodic"

    def value_at(self, n: int) -> Fraction:
        return self.values[n % len(self.values)]

    def sup_abs(self) -> Fraction:
        return max(abs(v) for v in self.values)

    def inf_abs(self) -> Fraction:
        return min(abs(v) for v in self.values)

    def log_abs_array(self, lo: int, hi: int) -> np.ndarray:
        logs = np.array([log_abs(v) for v in self.values])
        return logs[np.arange(lo, hi + 1) % len(self.values)]

    def neg_array(self, lo: int, hi: int) -> np.ndarray:
        neg = np.array([int(v < 0) for v in self.values], dtype=np.int64)
        return neg[np.arange(lo, hi + 1) % len(self.values)]

    def reflected(self) -> "_Periodic":
        L = len(self.values)
        return _Periodic(tuple(1 / self.values[(1 - r) % L] for r in range(L)))

    def moduli_ge_one_plus(self) -> bool:
        return all(abs(v) >= 1 for v in self.values)

    def moduli_le_one_minus(self) -> bool:
        return all(abs(v) <= 1 for v in self.values)

    def to_config(self) -> dict:
        return {"kind": "periodic", "values": [_fraction_str(v) for v in self.values]}


@dataclass(frozen=True)
class _Table:
    entries: tuple  # sorted tuple of (index, Fraction)
    default: "WeightRule"
    kind = "table"

    def _lookup(self, n: int) -> Optional[Fraction]:
        for k, v in self.entries:
            if k == n:
                return v
        return None

    def value_at(self, n: int) -> Fraction:
        v = self._lookup(n)
        return v if v is not None else self.default.eval(n)

    def sup_abs(self) -> Fraction:
        s = self.default.sup_abs
        for _, v in self.entries:
            s = max(s, abs(v))
        return s

    def inf_abs(self) -> Fraction:
        s = self.default.inf_abs
        for _, v in self.entries:
            s = min(s, abs(v))
        return s

    def log_abs_array(self, lo: int, hi: int) -> np.ndarray:
        arr = self.default.descriptor.log_abs_array(lo, hi).copy()
        for k, v in self.entries:
            if lo <= k <= hi:
                arr[k - lo] = log_abs(v)
        return arr

    def neg_array(self, lo: int, hi: int) -> np.ndarray:
        arr = self.default.descriptor.neg_array(lo, hi).copy()
        for k, v in self.entries:
            if lo <= k <= hi:
                arr[k - lo] = int(v < 0)
        return arr

    def reflected(self) -> "_Table":
        ref = tuple(sorted((1 - k, 1 / v) for k, v in self.entries))
        return _Table(ref, invert_reflect(self.default))

    def moduli_ge_one_plus(self) -> bool:
        if not self.default.descriptor.moduli_ge_one_plus():
            return False
        return all(abs(v) >= 1 for k, v in self.entries if k >= 1)

    def moduli_le_one_minus(self) -> bool:
        if not self.default.descriptor.moduli_le_one_minus():
            return False
        return all(abs(v) <= 1 for k, v in self.entries if k <= 0)

    def to_config(self) -> dict:
        return {
            "kind": "table",
            "entries": {str(k): _fraction_str(v) for k, v in self.entries},
            "default": self.default.to_config(),
        }


@dataclass(frozen=True)
class _Product:
    factors: tuple  # of WeightRule
    kind = "product"

    def value_at(self, n: int) -> Fraction:
        out = Fraction(1)
        for f in self.factors:
            out *= f.eval(n)
        return out

    def sup_abs(self) -> Fraction:
        out = Fraction(1)
        for f in self.factors:
            out *= f.sup_abs
        return out

    def inf_abs(self) -> Fraction:
        out = Fraction(1)
        for f in self.factors:
            out *= f.inf_abs
        return out

    def log_abs_array(self, lo: int, hi: int) -> np.ndarray:
        arr = np.zeros(hi - lo + 1)
        for f in self.factors:
            arr += f.descriptor.log_abs_array(lo, hi)
        return arr

    def neg_array(self, lo: int, hi: int) -> np.ndarray:
        arr = np.zeros(hi - lo + 1, dtype=np.int64)
        for f in self.factors:
            arr += f.descriptor.neg_array(lo, hi)
        return arr % 2

    def reflected(self) -> "_Product":
        return _Product(tuple(invert_reflect(f) for f in self.factors))

    def moduli_ge_one_plus(self) -> bool:
        return all(f.descriptor.moduli_ge_one_plus() for f in self.factors)

    def moduli_le_one_minus(self) -> bool:
        return all(f.descriptor.moduli_le_one_minus() for f in self.factors)

    def to_config(self) -> dict:
        return {"kind": "product", "factors": [f.to_config() for f in self.factors]}


@dataclass(frozen=True)
class _Callable:
    fn: Callable[[int], object]
    name: str
    declared_sup: Fraction
    declared_inf: Fraction
    kind = "callable"

    def value_at(self, n: int) -> Fraction:
        return _as_fraction(self.fn(n))

    def sup_abs(self) -> Fraction:
        return self.declared_sup

    def inf_abs(self) -> Fraction:
        return self.declared_inf

    def log_abs_array(self, lo: int, hi: int) -> np.ndarray:
        return np.array([log_abs(self.value_at(n)) for n in range(lo, hi + 1)])

    def neg_array(self, lo: int, hi: int) -> np.ndarray:
        return np.array([int(self.value_at(n) < 0) for n in range(lo, hi + 1)], dtype=np.int64)

    def reflected(self) -> "_Callable":
        fn = self.fn
        if self.declared_inf == 0:
            raise WeightError("cannot reflect a rule with declared inf 0")
        return _Callable(
            lambda n: 1 / _as_fraction(fn(-n + 1)),
            f"reflect({self.name})",
            1 / self.declared_inf,
            1 / self.declared_sup,
        )

    def moduli_ge_one_plus(self) -> bool:
        return self.declared_inf >= 1

    def moduli_le_one_minus(self) -> bool:
        return self.declared_sup <= 1

    def to_config(self) -> dict:
        raise WeightError(f"callable weight rule {self.name!r} is not serializable")


# ---------------------------------------------------------------------------
# public rule


@dataclass(frozen=True)
class WeightRule:
    """An evaluable, analytically bounded weight sequence.

    `sup_abs`/`inf_abs` default to the descriptor's analytic bounds; explicit
    looser declarations are allowed (e.g. inf 0 for a rule that is not to be
    treated as invertible).  Every evaluation is spot-checked against them.
    """

    descriptor: object
    sup_abs: Fraction = field(default=None)  # type: ignore[assignment]
    inf_abs: Fraction = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        sup = self.descriptor.sup_abs() if self.sup_abs is None else _as_fraction(self.sup_abs)
        inf = self.descriptor.inf_abs() if self.inf_abs is None else _as_fraction(self.inf_abs)
        if sup < self.descriptor.sup_abs():
            raise WeightError("declared sup_abs is below the descriptor's analytic bound")
        if inf > self.descriptor.inf_abs():
            raise WeightError("declared inf_abs is above the descriptor's analytic bound")
        if inf < 0:
            raise WeightError("inf_abs must be nonnegative")
        object.__setattr__(self, "sup_abs", sup)
        object.__setattr__(self, "inf_abs", inf)

    @property
    def kind(self) -> str:
        return self.descriptor.kind

    @property
    def invertible(self) -> bool:
        return self.inf_abs > 0  # sup is always finite for these descriptors

    def eval(self, n: int) -> Fraction:
        v = self.descriptor.value_at(int(n))
        a = abs(v)
        if v == 0 or a > self.sup_abs or a < self.inf_abs:
            raise WeightError(
                f"w_{n} = {v} violates declared bounds [{self.inf_abs}, {self.sup_abs}]"
            )
        return v

    def log_eval(self, n: int) -> LogScalar:
        return LogScalar.from_value(self.eval(n))

    def to_config(self) -> dict:
        cfg = self.descriptor.to_config()
        if self.sup_abs != self.descriptor.sup_abs():
            cfg["sup_abs"] = _fraction_str(self.sup_abs)
        if self.inf_abs != self.descriptor.inf_abs():
            cfg["inf_abs"] = _fraction_str(self.inf_abs)
        return cfg

    def __repr__(self):
        return f"WeightRule({self.descriptor.to_config() if self.kind != 'callable' else self.descriptor.name})"


# constructors


def constant_weight(value) -> WeightRule:
    return WeightRule(_Constant(_check_nonzero(_as_fraction(value), "constant")))


def two_sided_weight(plus, minus) -> WeightRule:
    return WeightRule(
        _TwoSided(
            _check_nonzero(_as_fraction(plus), "two_sided plus"),
            _check_nonzero(_as_fraction(minus), "two_sided minus"),
        )
    )


def periodic_weight(values) -> WeightRule:
    vals = tuple(_check_nonzero(_as_fraction(v), "periodic") for v in values)
    if not vals:
        raise WeightError("periodic rule needs at least one value")
    return WeightRule(_Periodic(vals))


def table_weight(entries, default: WeightRule) -> WeightRule:
    items = tuple(
        sorted((int(k), _check_nonzero(_as_fraction(v), f"table[{k}]")) for k, v in dict(entries).items())
    )
    return WeightRule(_Table(items, default))


def product_weight(factors) -> WeightRule:
    fs = tuple(factors)
    if not fs:
        raise WeightError("product rule needs at least one factor")
    return WeightRule(_Product(fs))


def callable_weight(fn, name: str, sup_abs, inf_abs) -> WeightRule:
    return WeightRule(_Callable(fn, name, _as_fraction(sup_abs), _as_fraction(inf_abs)))


def unweighted() -> WeightRule:
    return constant_weight(1)


# ---------------------------------------------------------------------------
# products and reflection


def weight_product(w: WeightRule, a: int, b: int) -> LogScalar:
    """Prod_{nu=a}^{b} w_nu in log domain; a > b gives the empty product 1."""
    if a > b:
        return LogScalar.one()
    logs = w.descriptor.log_abs_array(a, b)
    negs = int(w.descriptor.neg_array(a, b).sum())
    return LogScalar(-1 if negs % 2 else 1, float(logs.sum()))


def weight_product_exact(w: WeightRule, a: int, b: int) -> Fraction:
    """Exact rational Prod_{nu=a}^{b} w_nu; meant for small windows."""
    out = Fraction(1)
    for nu in range(a, b + 1):
        out *= w.eval(nu)
    return out


def invert_reflect(w: WeightRule) -> WeightRule:
    """The rule w'_n = 1/w_{-n+1} realizing the inverse shift as a backward shift."""
    if not w.invertible:
        raise WeightError("invert_reflect requires an invertible rule (declared inf_abs > 0)")
    refl = w.descriptor.reflected()
    # bounds swap and invert; keep declared overrides consistent
    return WeightRule(refl, sup_abs=1 / w.inf_abs, inf_abs=1 / w.sup_abs)


# ---------------------------------------------------------------------------
# prefix sums over an index range (the shared low-level plumbing for
# criteria evaluation and orbit simulation)


class WeightPrefix:
    """Cumulative log-moduli and sign parities of w over an index interval.

    With S(k) := sum_{nu=lo}^{k} log|w_nu| (S(lo-1) = 0),

        log Prod_{nu=a}^{b} |w_nu| = S(b) - S(a-1),

    and the conjugating sequence satisfies, for every k in the window,

        log |v_k| = S(0) - S(k).

    Anchoring both quantities on the same cumulative array makes the
    v-values and the split products bit-identical where they should agree.
    """

    def __init__(self, w: WeightRule, lo: int, hi: int):
        if lo > hi:
            raise ValueError("empty prefix range")
        if lo > 0 or hi < 1:
            # always cover [0, 1] so v and split products are expressible
            lo, hi = min(lo, 0), max(hi, 1)
        self.rule = w
        self.lo = lo
        self.hi = hi
        logs = w.descriptor.log_abs_array(lo, hi)
        negs = w.descriptor.neg_array(lo, hi)
        self._S = np.concatenate(([0.0], np.cumsum(logs)))
        self._N = np.concatenate(([0], np.cumsum(negs)))

    @property
    def cumulative(self) -> np.ndarray:
        """The cumulative log-modulus array S with S[0] = 0 anchored at lo."""
        return self._S

    def _i(self, k: int) -> int:
        if k < self.lo - 1 or k > self.hi:
            raise IndexError(f"index {k} outside prefix window [{self.lo}, {self.hi}]")
        return k - self.lo + 1

    def product_log(self, a: int, b: int) -> float:
        if a > b:
            return 0.0
        return float(self._S[self._i(b)] - self._S[self._i(a - 1)])

    def product_sign(self, a: int, b: int) -> int:
        if a > b:
            return 1
        neg = int(self._N[self._i(b)] - self._N[self._i(a - 1)])
        return -1 if neg % 2 else 1

    def product_sign_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Vectorized product_sign for elementwise ranges [a_i, b_i]."""
        ia = a - self.lo  # = _i(a-1)
        ib = b - self.lo + 1
        neg = (self._N[ib] - self._N[ia]) % 2
        signs = np.where(neg, -1, 1).astype(np.int64)
        return np.where(a > b, 1, signs)

    def v_log(self, k: int) -> float:
        """log|v_k| with v_k = 1/(w_1...w_k), 1, or w_{k+1}...w_0."""
        return float(self._S[self._i(0)] - self._S[self._i(k)])

    def v_sign(self, k: int) -> int:
        neg = int(self._N[self._i(0)] - self._N[self._i(k)])
        return -1 if neg % 2 else 1

    def v_log_array(self, lo: int, hi: int) -> np.ndarray:
        """log|v_k| for k in [lo, hi] as a dense array."""
        i0, ia, ib = self._i(0), self._i(lo), self._i(hi)
        return self._S[i0] - self._S[ia : ib + 1]

    def v_sign_array(self, lo: int, hi: int) -> np.ndarray:
        i0, ia, ib = self._i(0), self._i(lo), self._i(hi)
        neg = (self._N[i0] - self._N[ia : ib + 1]) % 2
        return np.where(neg, -1, 1).astype(np.int64)


# ---------------------------------------------------------------------------
# tail-shape predicates used by the finite-horizon checkers

def moduli_ge_one_on_positive_side(w: WeightRule) -> bool:
    """|w_nu| >= 1 for every nu >= 1 (so |v_k| is non-increasing for k >= 0)."""
    return w.descriptor.moduli_ge_one_plus()


def moduli_le_one_on_nonpositive_side(w: WeightRule) -> bool:
    """|w_nu| <= 1 for every nu <= 0 (so |v_k| is non-increasing as k -> -inf)."""
    return w.descriptor.moduli_le_one_minus()


# ---------------------------------------------------------------------------
# serialization


def weight_rule_to_config(w: WeightRule) -> dict:
    return w.to_config()


def weight_rule_from_config(cfg: dict) -> WeightRule:
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise WeightError(f"weight config must be a dict with a 'kind': {cfg!r}")
    kind = cfg["kind"]
    if kind == "constant":
        rule = constant_weight(cfg["value"])
    elif kind == "two_sided":
        rule = two_sided_weight(cfg["plus"], cfg["minus"])
    elif kind == "periodic":
        rule = periodic_weight(cfg["values"])
    elif kind == "table":
        rule = table_weight(
            {int(k): v for k, v in cfg["entries"].items()},
            weight_rule_from_config(cfg["default"]),
        )
    elif kind == "product":
        rule = product_weight(weight_rule_from_config(f) for f in cfg["factors"])
    else:
        raise WeightError(f"unknown weight kind {kind!r}")
    sup = cfg.get("sup_abs")
    inf = cfg.get("inf_abs")
    if sup is not None or inf is not None:
        rule = WeightRule(
            rule.descriptor,
            sup_abs=sup if sup is not None else rule.sup_abs,
            inf_abs=inf if inf is not None else rule.inf_abs,
        )
    return rule
