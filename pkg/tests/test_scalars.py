import math
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from shuffle_spectra.scalars import XFloat, format_scalar, rel_close


def test_from_fraction_small_values():
    assert XFloat.from_fraction(Fraction(1, 3)).to_float() == pytest.approx(1 / 3, rel=1e-16)
    assert XFloat.from_fraction(Fraction(0)).to_float() == 0.0
    assert XFloat.from_fraction(Fraction(-7, 2)).to_float() == -3.5


def test_from_fraction_huge_factorial():
    x = XFloat.from_fraction(factorial(2000))
    assert x.ln() == pytest.approx(math.lgamma(2001), rel=1e-12)


def test_tiny_powers_do_not_underflow():
    half = XFloat.from_fraction(Fraction(1, 2))
    tiny = half**10_000
    assert tiny.ln() == pytest.approx(-10_000 * math.log(2), rel=1e-12)
    assert tiny.to_float() == 0.0  # saturates only when collapsed to double


def test_arithmetic_matches_floats_in_range():
    a = XFloat(1.5, 3)  # 12
    b = XFloat(1.25, -1)  # 0.625
    assert (a + b).to_float() == 12.625
    assert (a - b).to_float() == 11.375
    assert (a * b).to_float() == 7.5
    assert (a / b).to_float() == 19.2
    assert (-a).to_float() == -12.0
    assert abs(XFloat(-1.5, 0)).to_float() == 1.5


def test_addition_drops_negligible_term():
    big = XFloat(1.0, 400)
    small = XFloat(1.0, 0)
    assert (big + small) == big


def test_pow_by_squaring():
    assert (XFloat(2.0) ** 100).to_float() == 2.0**100
    assert (XFloat(2.0) ** 0).to_float() == 1.0
    assert (XFloat(2.0) ** -2).to_float() == 0.25


def test_from_ln_roundtrip():
    for target in (-30_000.0, -1.0, 0.0, 12345.678):
        assert XFloat.from_ln(target).ln() == pytest.approx(target, abs=1e-9)


def test_comparisons():
    assert XFloat(1.0, 10) > XFloat(1.9, 9)
    assert XFloat(-1.0, 10) < XFloat(1.0, -10)
    assert XFloat(1.5, 2) == XFloat.from_fraction(6)


def test_decimal17_in_double_range_matches_g_format():
    x = 0.12345678901234567
    assert XFloat(x).decimal17() == f"{x:.17g}"
    assert format_scalar(Fraction(1, 2)) == "0.5"
    assert format_scalar(14 / 9) == f"{14/9:.17g}"


def test_decimal17_beyond_double_range():
    import decimal

    def reference(fr: Fraction) -> str:
        with decimal.localcontext() as ctx:
            ctx.prec = 17
            ctx.rounding = decimal.ROUND_HALF_UP
            d = decimal.Decimal(fr.numerator) / decimal.Decimal(fr.denominator)
            sign, digits, exp = d.as_tuple()
            mantissa = "".join(map(str, digits)).ljust(17, "0")
            e10 = exp + len(digits) - 1
            return f"{'-' if sign else ''}{mantissa[0]}.{mantissa[1:]}e{e10:+03d}"

    for fr in (Fraction(2) ** 3600, Fraction(3, 10**500), -Fraction(7**700, 11**350)):
        assert XFloat.from_fraction(fr).decimal17() == reference(XFloat.from_fraction(fr).to_fraction())
    assert XFloat(0.0).decimal17() == "0"


def test_rel_close():
    assert rel_close(Fraction(1, 3), 1 / 3, 1e-9)
    assert not rel_close(1.0, 1.1, 1e-9)
    assert rel_close(XFloat(0.0), Fraction(0))


@given(st.floats(min_value=1e-300, max_value=1e300, allow_nan=False))
def test_float_roundtrip_exact(x):
    assert XFloat(x).to_float() == x


@given(st.fractions(min_value=Fraction(-10**6), max_value=Fraction(10**6)))
def test_fraction_conversion_within_one_ulp(fr):
    x = XFloat.from_fraction(fr)
    if fr == 0:
        assert x.to_float() == 0.0
        return
    err = abs(x.to_fraction() - fr) / abs(fr)
    assert err <= Fraction(1, 2**52)
