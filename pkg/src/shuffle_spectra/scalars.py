"""Scalar arithmetic for spectral quantities.

Two concrete representations are used, and ``Scalar`` is their union:

* exact mode -- ``fractions.Fraction`` (arbitrary-precision rationals), the
  default whenever n and k are small enough for oracle work;
* float mode -- :class:`XFloat`, a double mantissa normalized to [1, 2)
  paired with an unbounded integer base-2 exponent, so quantities like
  ``(p + 1) ** -k`` for k ~ 1e4 or ``n!`` for n ~ 1e4 neither underflow nor
  overflow.

Conversion from exact to float is correctly rounded (well within the 1-ulp
contract); float-mode comparisons against tolerances are done by the caller
through :func:`rel_close`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

_LN2 = math.log(2.0)
_LOG10_2 = math.log10(2.0)


class XFloat:
    """A float scaled by an unbounded power of two: value = m * 2**e.

    The mantissa m carries the sign and satisfies 1 <= |m| < 2 (or m == 0,
    in which case e == 0).
    """

    __slots__ = ("m", "e")

    def __init__(self, mantissa: float, exponent: int = 0):
        if mantissa == 0.0:
            self.m = 0.0
            self.e = 0
            return
        if math.isnan(mantissa) or math.isinf(mantissa):
            raise ValueError(f"non-finite mantissa {mantissa!r}")
        fm, fe = math.frexp(mantissa)  # mantissa = fm * 2**fe, 0.5 <= |fm| < 1
        self.m = fm * 2.0
        self.e = exponent + fe - 1

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> "XFloat":
        if isinstance(value, int):
            value = Fraction(value)
        num, den = value.numerator, value.denominator
        if num == 0:
            return cls(0.0)
        shift = num.bit_length() - den.bit_length()
        # scale so the quotient is in [0.5, 2); big-int true division in
        # CPython is correctly rounded
        if shift >= 0:
            m = num / (den << shift)
        else:
            m = (num << -shift) / den
        return cls(m, shift)

    @classmethod
    def from_ln(cls, natural_log: float) -> "XFloat":
        """exp(natural_log) as an XFloat; natural_log may be far below -745."""
        if natural_log == -math.inf:
            return cls(0.0)
        e2 = math.floor(natural_log / _LN2)
        frac = natural_log - e2 * _LN2
        return cls(math.exp(frac), e2)

    @classmethod
    def coerce(cls, value: "ScalarLike") -> "XFloat":
        if isinstance(value, XFloat):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.from_fraction(value)
        return cls(float(value))

    # -- conversions -------------------------------------------------------

    def to_float(self) -> float:
        """Collapse to a plain double; saturates to 0.0 / +-inf outside range."""
        if self.m == 0.0:
            return 0.0
        try:
            return math.ldexp(self.m, self.e)
        except OverflowError:
            return math.copysign(math.inf, self.m)

    def to_fraction(self) -> Fraction:
        if self.m == 0.0:
            return Fraction(0)
        return Fraction(self.m) * Fraction(2) ** self.e

    def ln(self) -> float:
        if self.m == 0.0:
            return -math.inf
        if self.m < 0:
            raise ValueError("ln of a negative XFloat")
        return math.log(self.m) + self.e * _LN2

    def __float__(self) -> float:
        return self.to_float()

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "XFloat":
        out = XFloat.__new__(XFloat)
        out.m = -self.m
        out.e = self.e
        return out

    def __abs__(self) -> "XFloat":
        out = XFloat.__new__(XFloat)
        out.m = abs(self.m)
        out.e = self.e
        return out

    def __add__(self, other) -> "XFloat":
        other = XFloat.coerce(other)
        if self.m == 0.0:
            return other
        if other.m == 0.0:
            return self
        hi, lo = (self, other) if self.e >= other.e else (other, self)
        d = hi.e - lo.e
        if d > 128:  # lo is below half an ulp of hi
            return hi
        return XFloat(hi.m + math.ldexp(lo.m, -d), hi.e)

    __radd__ = __add__

    def __sub__(self, other) -> "XFloat":
        return self + (-XFloat.coerce(other))

    def __rsub__(self, other) -> "XFloat":
        return XFloat.coerce(other) + (-self)

    def __mul__(self, other) -> "XFloat":
        other = XFloat.coerce(other)
        if self.m == 0.0 or other.m == 0.0:
            return XFloat(0.0)
        return XFloat(self.m * other.m, self.e + other.e)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "XFloat":
        other = XFloat.coerce(other)
        if other.m == 0.0:
            raise ZeroDivisionError("XFloat division by zero")
        if self.m == 0.0:
            return XFloat(0.0)
        return XFloat(self.m / other.m, self.e - other.e)

    def __rtruediv__(self, other) -> "XFloat":
        return XFloat.coerce(other) / self

    def __pow__(self, exponent: int) -> "XFloat":
        if not isinstance(exponent, int):
            raise TypeError("XFloat exponent must be an integer")
        if exponent < 0:
            return XFloat(1.0) / self ** (-exponent)
        result = XFloat(1.0)
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparisons (exact on the representation) --------------------------

    def _cmp(self, other) -> int:
        other = XFloat.coerce(other)
        diff = self - other
        if diff.m > 0:
            return 1
        if diff.m < 0:
            return -1
        return 0

    def __eq__(self, other) -> bool:
        try:
            return self._cmp(other) == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash((self.m, self.e))

    def __repr__(self) -> str:
        return f"XFloat({self.m!r}, {self.e})"

    # -- formatting ---------------------------------------------------------

    def decimal17(self) -> str:
        """Decimal string with 17 significant digits, any magnitude."""
        if self.m == 0.0:
            return "0"
        if -960 < self.e < 960:
            return f"{self.to_float():.17g}"
        sign = "-" if self.m < 0 else ""
        fr = abs(self).to_fraction()
        num, den = fr.numerator, fr.denominator
        e10 = math.floor((num.bit_length() - den.bit_length()) * _LOG10_2)
        # adjust so 10**e10 <= num/den < 10**(e10+1)
        while _cmp_pow10(num, den, e10) < 0:
            e10 -= 1
        while _cmp_pow10(num, den, e10 + 1) >= 0:
            e10 += 1
        scale = 16 - e10
        if scale >= 0:
            divisor = den
            q, r = divmod(num * 10**scale, divisor)
        else:
            divisor = den * 10**-scale
            q, r = divmod(num, divisor)
        if 2 * r >= divisor:
            q += 1
        digits = str(q)
        if len(digits) == 18:  # rounding carried over
            digits = digits[:17]
            e10 += 1
        return f"{sign}{digits[0]}.{digits[1:]}e{e10:+03d}"


def _cmp_pow10(num: int, den: int, e10: int) -> int:
    """Sign of num/den - 10**e10 using integer arithmetic only."""
    if e10 >= 0:
        lhs, rhs = num, den * 10**e10
    else:
        lhs, rhs = num * 10**-e10, den
    return (lhs > rhs) - (lhs < rhs)


ScalarLike = Union[Fraction, int, float, XFloat]
Scalar = Union[Fraction, XFloat]


def as_float(value: ScalarLike) -> float:
    if isinstance(value, XFloat):
        return value.to_float()
    return float(value)


def as_xfloat(value: ScalarLike) -> XFloat:
    return XFloat.coerce(value)


def format_scalar(value: ScalarLike) -> str:
    """17-significant-digit decimal rendering used by every CSV writer."""
    if isinstance(value, XFloat):
        return value.decimal17()
    return f"{float(value):.17g}"


def rel_close(a: ScalarLike, b: ScalarLike, rel_tol: float = 1e-9) -> bool:
    """|a - b| <= rel_tol * max(|a|, |b|), with exact zero handled."""
    xa, xb = as_xfloat(a), as_xfloat(b)
    diff = abs(xa - xb)
    scale = max(abs(xa), abs(xb))
    if scale.m == 0.0:
        return True
    return diff <= scale * XFloat(rel_tol)


def pow2t(value: ScalarLike, t: int) -> Scalar:
    """value**(2t) staying in the representation of the input."""
    if isinstance(value, XFloat):
        return value ** (2 * t)
    return Fraction(value) ** (2 * t)
