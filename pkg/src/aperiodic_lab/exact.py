"""Exact arithmetic in Q(tau), tau = (1 + sqrt 5) / 2.

Elements are stored as ``(a + b*tau) / den`` with integer ``a``, ``b`` and a
positive integer ``den``.  Every ordering decision reduces to :func:`zsign`,
which works on integers only.  Square roots are never taken in decision
paths; distances are carried squared and roots only appear in
:func:`display` / :func:`sqrt_bounds`.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np

__all__ = [
    "QNum",
    "Point",
    "TAU",
    "zsign",
    "qsign",
    "cmp_sq",
    "sq_dist",
    "sq_norm",
    "as_qnum",
    "parse_number",
    "q_floor",
    "q_ceil",
    "rational_bounds",
    "sqrt_bounds",
    "sqrt_exact",
    "display",
    "display_sqrt",
    "AUDIT",
    "audited",
]


@dataclass
class ComparisonAudit:
    """Counters for the exact-comparison layer (enabled in test builds)."""

    enabled: bool = False
    exact: int = 0
    floating: int = 0

    def reset(self) -> None:
        self.exact = 0
        self.floating = 0


AUDIT = ComparisonAudit()


@contextlib.contextmanager
def audited() -> Iterator[ComparisonAudit]:
    """Count exact and floating comparisons inside the block."""
    prev = AUDIT.enabled
    AUDIT.reset()
    AUDIT.enabled = True
    try:
        yield AUDIT
    finally:
        AUDIT.enabled = prev


def _flag_float() -> None:
    AUDIT.floating += 1
    raise TypeError("floating-point value reached an exact comparison")


def zsign(a: int, b: int) -> int:
    """Sign of ``a + b*tau`` for integers ``a``, ``b``."""
    if AUDIT.enabled:
        if type(a) is float or type(b) is float:
            _flag_float()
        AUDIT.exact += 1
    # a + b*tau = ((2a + b) + b*sqrt5) / 2
    u = 2 * a + b
    if b == 0:
        return (u > 0) - (u < 0)
    if u == 0 or (u > 0) == (b > 0):
        return 1 if b > 0 else -1
    if u * u > 5 * b * b:
        return 1 if u > 0 else -1
    return 1 if b > 0 else -1


def int_array_check(*arrays: np.ndarray) -> None:
    """Vectorized comparisons are only allowed on integer arrays."""
    for arr in arrays:
        kind = np.asarray(arr).dtype.kind
        if kind not in "iub":
            if AUDIT.enabled:
                _flag_float()
            raise TypeError(f"non-integer array ({np.asarray(arr).dtype}) in exact path")
    if AUDIT.enabled:
        AUDIT.exact += 1


Number = Union[int, Fraction, "QNum"]


class QNum:
    """Immutable element ``(a + b*tau) / den`` of Q(tau)."""

    __slots__ = ("a", "b", "den")

    def __init__(self, a: int = 0, b: int = 0, den: int = 1) -> None:
        if den == 0:
            raise ZeroDivisionError("QNum with zero denominator")
        if den < 0:
            a, b, den = -a, -b, -den
        g = math.gcd(math.gcd(a, b), den)
        if g > 1:
            a, b, den = a // g, b // g, den // g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("QNum is immutable")

    def __reduce__(self):
        return (QNum, (self.a, self.b, self.den))

    @classmethod
    def from_fraction(cls, f: Fraction | int) -> QNum:
        f = Fraction(f)
        return cls(f.numerator, 0, f.denominator)

    @classmethod
    def parse(cls, text: str) -> QNum:
        a, b, den = (int(t) for t in text.split())
        if den <= 0:
            raise ValueError(f"QNum denominator must be positive: {text!r}")
        q = cls(a, b, den)
        if (q.a, q.b, q.den) != (a, b, den):
            raise ValueError(f"QNum string not normalized: {text!r}")
        return q

    def __str__(self) -> str:
        return f"{self.a} {self.b} {self.den}"

    def __repr__(self) -> str:
        return f"QNum({self.a}, {self.b}, {self.den})"

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self!r} is irrational")
        return Fraction(self.a, self.den)

    def conj(self) -> QNum:
        # tau -> 1 - tau
        return QNum(self.a + self.b, -self.b, self.den)

    def norm(self) -> Fraction:
        return Fraction(self.a * self.a + self.a * self.b - self.b * self.b, self.den * self.den)

    def __hash__(self) -> int:
        if self.b == 0:
            # consistent with int / Fraction equality
            return hash(self.a) if self.den == 1 else hash(Fraction(self.a, self.den))
        return hash((self.a, self.b, self.den))

    def __eq__(self, other) -> bool:
        if isinstance(other, QNum):
            return self.a == other.a and self.b == other.b and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self == QNum.from_fraction(other)
        if isinstance(other, float):
            if AUDIT.enabled:
                _flag_float()
        return NotImplemented

    # arithmetic
    def __add__(self, other: Number) -> QNum:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QNum(self.a * o.den + o.a * self.den, self.b * o.den + o.b * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> QNum:
        return QNum(-self.a, -self.b, self.den)

    def __pos__(self) -> QNum:
        return self

    def __sub__(self, other: Number) -> QNum:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QNum(self.a * o.den - o.a * self.den, self.b * o.den - o.b * self.den, self.den * o.den)

    def __rsub__(self, other: Number) -> QNum:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Number) -> QNum:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, a2, b2 = self.a, self.b, o.a, o.b
        # tau^2 = tau + 1
        return QNum(a1 * a2 + b1 * b2, a1 * b2 + a2 * b1 + b1 * b2, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> QNum:
        n = self.a * self.a + self.a * self.b - self.b * self.b
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        # 1/(a + b tau) = ((a + b) - b tau) / norm
        return QNum((self.a + self.b) * self.den, -self.b * self.den, n)

    def __truediv__(self, other: Number) -> QNum:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Number) -> QNum:
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> QNum:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self) -> QNum:
        return -self if qsign(self) < 0 else self

    # ordering, always through zsign
    def _cmp(self, other) -> int:
        if isinstance(other, float):
            if AUDIT.enabled:
                _flag_float()
            raise TypeError("QNum compared with float")
        o = _coerce(other)
        if o is None:
            raise TypeError(f"cannot compare QNum with {type(other).__name__}")
        return zsign(self.a * o.den - o.a * self.den, self.b * o.den - o.b * self.den)

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __float__(self) -> float:
        # display only
        return (self.a + self.b * (1 + math.sqrt(5)) / 2) / self.den

    def __bool__(self) -> bool:
        return bool(self.a or self.b)


def _coerce(x) -> QNum | None:
    if isinstance(x, QNum):
        return x
    if isinstance(x, bool):
        return None
    if isinstance(x, (int, np.integer)):
        return QNum(int(x), 0, 1)
    if isinstance(x, Fraction):
        return QNum(x.numerator, 0, x.denominator)
    return None


ZERO = QNum(0)
ONE = QNum(1)
TAU = QNum(0, 1, 1)

Point = tuple  # tuple[QNum, ...]


def as_qnum(x) -> QNum:
    q = _coerce(x)
    if q is None:
        if isinstance(x, str):
            return parse_number(x)
        raise TypeError(f"cannot convert {type(x).__name__} to QNum")
    return q


def parse_number(text: str) -> QNum:
    """Parse ``"a b den"`` (QNum form) or a rational such as ``"3/2"``."""
    text = text.strip()
    if len(text.split()) == 3:
        a, b, den = (int(t) for t in text.split())
        return QNum(a, b, den)
    if any(c in text.lower() for c in ".e") and "/" not in text:
        # decimal strings are exact decimals, not binary floats
        return QNum.from_fraction(Fraction(Decimal(text)))
    return QNum.from_fraction(Fraction(text))


def qsign(q: QNum) -> int:
    """Sign of ``q`` in {-1, 0, +1}, decided with integer arithmetic only."""
    return zsign(q.a, q.b)


def cmp_sq(u: QNum, v: QNum) -> int:
    """Sign of ``u - v``."""
    return qsign(u - v)


def sq_norm(v: Sequence[QNum]) -> QNum:
    out = ZERO
    for c in v:
        out = out + c * c
    return out


def sq_dist(p: Sequence[QNum], q: Sequence[QNum]) -> QNum:
    if len(p) != len(q):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(q)}")
    out = ZERO
    for x, y in zip(p, q):
        t = as_qnum(x) - as_qnum(y)
        out = out + t * t
    return out


def q_floor(q: QNum) -> int:
    """Exact floor of a QNum."""
    a, b, den = q.a, q.b, q.den
    if b == 0:
        return a // den
    # q = ((2a + b) + b*sqrt5) / (2 den); floor(b*sqrt5) via isqrt
    r = math.isqrt(5 * b * b)
    f = r if b > 0 else -r - 1
    return (2 * a + b + f) // (2 * den)


def q_ceil(q: QNum) -> int:
    return -q_floor(-q)


def rational_bounds(q: QNum, bits: int = 64) -> tuple[Fraction, Fraction]:
    """``lo <= q <= hi`` with ``hi - lo <= 2**-bits``."""
    if q.b == 0:
        f = Fraction(q.a, q.den)
        return f, f
    scale = 1 << bits
    k = q_floor(q * scale)
    return Fraction(k, scale), Fraction(k + 1, scale)


def sqrt_bounds(q: QNum, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational ``lo <= sqrt(q) <= hi`` for ``q >= 0``."""
    if qsign(q) < 0:
        raise ValueError("square root of a negative number")
    exact = sqrt_exact(q)
    if exact is not None and exact.b == 0:
        f = exact.to_fraction()
        return f, f
    lo, hi = rational_bounds(q, bits + 4)
    scale = 1 << bits
    s2 = scale * scale
    lo_root = Fraction(math.isqrt(math.floor(lo * s2)), scale)
    hi_root = Fraction(math.isqrt(math.ceil(hi * s2)) + 1, scale)
    return lo_root, hi_root


def sqrt_exact(q: QNum) -> QNum | None:
    """The non-negative square root of ``q`` when it is rational, else None."""
    if q.b != 0 or q.a < 0:
        return None
    ra, rd = math.isqrt(q.a), math.isqrt(q.den)
    if ra * ra == q.a and rd * rd == q.den:
        return QNum(ra, 0, rd)
    return None


def _to_decimal(q: QNum, sig: int) -> Decimal:
    lo, _ = rational_bounds(q, 4 * sig + 16)
    ctx = Context(prec=sig + 10)
    return ctx.divide(Decimal(lo.numerator), Decimal(lo.denominator))


def _render(dec: Decimal, sig: int) -> str:
    if dec == 0:
        return "0"
    ctx = Context(prec=sig, rounding=ROUND_HALF_EVEN)
    out = ctx.plus(dec)
    text = format(out, "g")
    return text


def display(q, sig: int = 12) -> str:
    """Round to ``sig`` significant digits, round-half-even.  Display only."""
    if q is None:
        return "inf"
    q = as_qnum(q)
    if q.b == 0:
        f = Fraction(q.a, q.den)
        dec = Context(prec=sig + 10).divide(Decimal(f.numerator), Decimal(f.denominator))
        return _render(dec, sig)
    return _render(_to_decimal(q, sig), sig)


def display_sqrt(q_sq, sig: int = 12) -> str:
    """Display ``sqrt(q_sq)``; display only."""
    if q_sq is None:
        return "inf"
    q_sq = as_qnum(q_sq)
    lo, _ = sqrt_bounds(q_sq, 4 * sig + 16)
    dec = Context(prec=sig + 10).divide(Decimal(lo.numerator), Decimal(lo.denominator))
    return _render(dec, sig)
