"""Outward-rounded interval arithmetic and polynomials with interval coefficients.

Every primitive is computed in round-to-nearest double precision and then
widened to the adjacent representable value on each side where the exact
result may lie outside the rounded one. The direction is decided with
error-free transformations (TwoSum, Dekker's TwoProduct), so exact results
stay point-tight: iv_sqrt([4, 9]) is exactly [2, 3].
"""
import math
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from .exceptions import IntervalDomainError

Number = Union[int, float]

_INF = math.inf
_SPLITTER = 134217729.0  # 2**27 + 1
# Outside this window TwoProduct may overflow or lose exactness to underflow.
_SAFE_HI = 1e150
_SAFE_LO = 1e-140


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _finite(x: float) -> float:
    if not math.isfinite(x):
        raise IntervalDomainError(f"Non-finite interval bound: {x}")
    return x


def _two_sum(a: float, b: float) -> Tuple[float, float]:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(a: float) -> Tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> Tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _safe_for_eft(*values: float) -> bool:
    for v in values:
        av = abs(v)
        if av > _SAFE_HI or (av != 0.0 and av < _SAFE_LO):
            return False
    return True


def _bracket(value: float, err: float) -> Tuple[float, float]:
    """Enclose value + err where value is the rounded result and err the exact remainder sign."""
    if err > 0:
        return value, _up(value)
    if err < 0:
        return _down(value), value
    return value, value


def add_round(a: float, b: float) -> Tuple[float, float]:
    s, err = _two_sum(a, b)
    if not math.isfinite(s):
        raise IntervalDomainError("Overflow in interval addition")
    return _bracket(s, err)


def mul_round(a: float, b: float) -> Tuple[float, float]:
    p = a * b
    if not math.isfinite(p):
        raise IntervalDomainError("Overflow in interval multiplication")
    if a == 0.0 or b == 0.0:
        return 0.0, 0.0
    if not _safe_for_eft(a, b, p):
        return _down(p), _up(p)
    p, err = _two_prod(a, b)
    return _bracket(p, err)


def div_round(a: float, b: float) -> Tuple[float, float]:
    q = a / b
    if not math.isfinite(q):
        raise IntervalDomainError("Overflow in interval division")
    if a == 0.0:
        return 0.0, 0.0
    if not _safe_for_eft(a, b, q):
        return _down(q), _up(q)
    # sign(a/b - q) = sign(a - q*b) * sign(b)
    p, err = _two_prod(q, b)
    remainder = (a - p) - err
    if b < 0:
        remainder = -remainder
    return _bracket(q, remainder)


def sqrt_round(x: float) -> Tuple[float, float]:
    r = math.sqrt(x)
    if r == 0.0:
        return 0.0, 0.0
    if not _safe_for_eft(r, x):
        return _down(r), _up(r)
    p, err = _two_prod(r, r)
    return _bracket(r, (x - p) - err)


class Interval:
    """Closed interval [lo, hi] with finite double bounds."""

    __slots__ = ('lo', 'hi')

    def __init__(self, lo: Number, hi: Number = None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("Interval bounds must not be NaN")
        if lo > hi:
            raise ValueError(f"Interval lower bound {lo} exceeds upper bound {hi}")
        self.lo = _finite(lo)
        self.hi = _finite(hi)

    @classmethod
    def point(cls, x: Number) -> 'Interval':
        return cls(x, x)

    @classmethod
    def enclose(cls, value: Union[str, Decimal, Fraction, Number]) -> 'Interval':
        """Tightest interval containing an exact decimal or rational value."""
        if isinstance(value, float):
            return cls(value, value)
        if isinstance(value, Fraction):
            nearest = float(value)
            if Fraction(nearest) == value:
                return cls(nearest, nearest)
            return cls(nearest, _up(nearest)) if Fraction(nearest) < value else cls(_down(nearest), nearest)
        exact = Decimal(value)
        nearest = float(exact)
        represented = Decimal(nearest)
        if represented == exact:
            return cls(nearest, nearest)
        if represented < exact:
            return cls(nearest, _up(nearest))
        return cls(_down(nearest), nearest)

    @staticmethod
    def coerce(other) -> 'Interval':
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, float)):
            if isinstance(other, int) and abs(other) > 2 ** 53:
                return Interval.enclose(Fraction(other))
            return Interval(other, other)
        raise TypeError(f"Cannot use {type(other).__name__} as an interval")

    # Queries

    @property
    def mid(self) -> float:
        return 0.5 * self.lo + 0.5 * self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value) -> bool:
        if isinstance(value, Interval):
            return self.lo <= value.lo and value.hi <= self.hi
        return self.lo <= value <= self.hi

    def __contains__(self, value) -> bool:
        return self.contains(value)

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def hull(self, other: 'Interval') -> 'Interval':
        other = Interval.coerce(other)
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def split(self) -> Tuple['Interval', 'Interval']:
        m = self.mid
        if not self.lo < m < self.hi:
            raise ValueError(f"Interval {self} is too narrow to split")
        return Interval(self.lo, m), Interval(m, self.hi)

    # Operators

    def __add__(self, other):
        if isinstance(other, IntervalPoly):
            return NotImplemented
        return iv_add(self, Interval.coerce(other))

    def __radd__(self, other):
        return iv_add(Interval.coerce(other), self)

    def __sub__(self, other):
        if isinstance(other, IntervalPoly):
            return NotImplemented
        return iv_sub(self, Interval.coerce(other))

    def __rsub__(self, other):
        return iv_sub(Interval.coerce(other), self)

    def __mul__(self, other):
        if isinstance(other, IntervalPoly):
            return NotImplemented
        return iv_mul(self, Interval.coerce(other))

    def __rmul__(self, other):
        return iv_mul(Interval.coerce(other), self)

    def __truediv__(self, other):
        if isinstance(other, IntervalPoly):
            return NotImplemented
        return iv_div(self, Interval.coerce(other))

    def __rtruediv__(self, other):
        return iv_div(Interval.coerce(other), self)

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return iv_powi(self, n)

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def iv_add(x: Interval, y: Interval) -> Interval:
    lo, _ = add_round(x.lo, y.lo)
    _, hi = add_round(x.hi, y.hi)
    return Interval(lo, hi)


def iv_sub(x: Interval, y: Interval) -> Interval:
    lo, _ = add_round(x.lo, -y.hi)
    _, hi = add_round(x.hi, -y.lo)
    return Interval(lo, hi)


def iv_mul(x: Interval, y: Interval) -> Interval:
    lows, highs = [], []
    for a in (x.lo, x.hi):
        for b in (y.lo, y.hi):
            lo, hi = mul_round(a, b)
            lows.append(lo)
            highs.append(hi)
    return Interval(min(lows), max(highs))


def iv_div(x: Interval, y: Interval) -> Interval:
    if y.contains_zero():
        raise IntervalDomainError(f"Division by interval containing zero: {y}")
    lows, highs = [], []
    for a in (x.lo, x.hi):
        for b in (y.lo, y.hi):
            lo, hi = div_round(a, b)
            lows.append(lo)
            highs.append(hi)
    return Interval(min(lows), max(highs))


def iv_sqrt(x: Interval) -> Interval:
    if x.lo < 0.0:
        raise IntervalDomainError(f"Square root of interval with negative lower bound: {x}")
    lo, _ = sqrt_round(x.lo)
    _, hi = sqrt_round(x.hi)
    return Interval(lo, hi)


def _abs_pow(v: float, n: int) -> Tuple[float, float]:
    """Directed enclosure of |v|**n by repeated multiplication on non-negative values."""
    base = abs(v)
    lo, hi = 1.0, 1.0
    for _ in range(n):
        lo, _ = mul_round(lo, base)
        _, hi = mul_round(hi, base)
    return lo, hi


def iv_powi(x: Interval, n: int) -> Interval:
    if n < 0:
        raise ValueError("iv_powi needs a non-negative integer exponent")
    if n == 0:
        return Interval(1.0, 1.0)
    lo_lo, lo_hi = _abs_pow(x.lo, n)
    hi_lo, hi_hi = _abs_pow(x.hi, n)
    if n % 2 == 1:
        # odd powers are monotone increasing
        lower = -lo_hi if x.lo < 0 else lo_lo
        upper = -hi_lo if x.hi < 0 else hi_hi
        return Interval(lower, upper)
    if x.lo >= 0.0:
        return Interval(lo_lo, hi_hi)
    if x.hi <= 0.0:
        return Interval(hi_lo, lo_hi)
    return Interval(0.0, max(lo_hi, hi_hi))


def sqrt3() -> Interval:
    return iv_sqrt(Interval.point(3.0))


def sqrt3_over_3() -> Interval:
    return sqrt3() / 3


class IntervalPoly:
    """Univariate polynomial with interval coefficients, index = degree."""

    __slots__ = ('coefficients',)

    def __init__(self, coefficients: Iterable):
        coeffs: List[Interval] = [Interval.coerce(c) for c in coefficients]
        while len(coeffs) > 1 and coeffs[-1].lo == 0.0 and coeffs[-1].hi == 0.0:
            coeffs.pop()
        if not coeffs:
            coeffs = [Interval(0.0, 0.0)]
        self.coefficients = coeffs

    @classmethod
    def variable(cls) -> 'IntervalPoly':
        return cls([0.0, 1.0])

    @staticmethod
    def coerce(other) -> 'IntervalPoly':
        if isinstance(other, IntervalPoly):
            return other
        return IntervalPoly([Interval.coerce(other)])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, k: int) -> Interval:
        if 0 <= k < len(self.coefficients):
            return self.coefficients[k]
        return Interval(0.0, 0.0)

    def evaluate(self, x) -> Interval:
        return poly_eval_horner(self, Interval.coerce(x))

    def hull(self, other: 'IntervalPoly') -> 'IntervalPoly':
        n = max(len(self.coefficients), len(other.coefficients))
        return IntervalPoly([self.coefficient(k).hull(other.coefficient(k)) for k in range(n)])

    def __add__(self, other):
        return poly_add(self, IntervalPoly.coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return poly_add(self, poly_scale(IntervalPoly.coerce(other), Interval(-1.0)))

    def __rsub__(self, other):
        return poly_add(IntervalPoly.coerce(other), poly_scale(self, Interval(-1.0)))

    def __mul__(self, other):
        if isinstance(other, IntervalPoly):
            return poly_mul(self, other)
        return poly_scale(self, Interval.coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        divisor = Interval.coerce(other)
        return IntervalPoly([iv_div(c, divisor) for c in self.coefficients])

    def __neg__(self):
        return poly_scale(self, Interval(-1.0))

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = IntervalPoly([1.0])
        for _ in range(n):
            result = poly_mul(result, self)
        return result

    def __repr__(self):
        return f"IntervalPoly({self.coefficients!r})"


def poly_add(p: IntervalPoly, q: IntervalPoly) -> IntervalPoly:
    n = max(len(p.coefficients), len(q.coefficients))
    return IntervalPoly([iv_add(p.coefficient(k), q.coefficient(k)) for k in range(n)])


def poly_mul(p: IntervalPoly, q: IntervalPoly) -> IntervalPoly:
    out = [Interval(0.0, 0.0)] * (len(p.coefficients) + len(q.coefficients) - 1)
    for i, a in enumerate(p.coefficients):
        for j, b in enumerate(q.coefficients):
            out[i + j] = iv_add(out[i + j], iv_mul(a, b))
    return IntervalPoly(out)


def poly_scale(p: IntervalPoly, factor: Interval) -> IntervalPoly:
    factor = Interval.coerce(factor)
    return IntervalPoly([iv_mul(c, factor) for c in p.coefficients])


def poly_eval_horner(p: IntervalPoly, x: Interval) -> Interval:
    result = p.coefficients[-1]
    for c in reversed(p.coefficients[:-1]):
        result = iv_add(iv_mul(result, x), c)
    return result


def generic_sqrt(x):
    """sqrt for floats and intervals, used by expressions shared by both paths."""
    if isinstance(x, Interval):
        return iv_sqrt(x)
    return math.sqrt(x)


def det4(m: Sequence[Sequence]):
    """4x4 determinant by Laplace expansion along the first two rows.

    Works for any entry type closed under + - * (floats, Interval, IntervalPoly).
    """
    def minor(r0, r1, c0, c1):
        return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]

    return (minor(0, 1, 0, 1) * minor(2, 3, 2, 3)
            - minor(0, 1, 0, 2) * minor(2, 3, 1, 3)
            + minor(0, 1, 0, 3) * minor(2, 3, 1, 2)
            + minor(0, 1, 1, 2) * minor(2, 3, 0, 3)
            - minor(0, 1, 1, 3) * minor(2, 3, 0, 2)
            + minor(0, 1, 2, 3) * minor(2, 3, 0, 1))
