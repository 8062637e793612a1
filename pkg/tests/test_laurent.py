import random

import pytest
from hypothesis import given, settings, strategies as st

from fqapprox.algebra import NEG_INF, Poly, field
from fqapprox.errors import DivisionByZero, ParseError, SpecMismatch, UndeterminedToPrecision
from fqapprox.laurent import (
    Laurent,
    Vec2Laurent,
    format_series,
    frac_deg,
    from_rational,
    integral_part,
    laurent_arith,
    parse_series,
    random_series,
    random_unit_series,
    split_integral_fractional,
)

F2, F3 = field(2), field(3)


def S(spec, text):
    return parse_series(spec, text)


def test_square_in_characteristic_two():
    x = S(F2, "1+T^-1+O(T^-10)")
    assert format_series(x * x) == "1+T^-2+O(T^-10)"


def test_product_precision():
    a = S(F2, "T^-1+T^-3+O(T^-9)")
    b = Laurent.from_poly(Poly.T(F2) + 1, 0)
    got = a * b
    # exact polynomial factor: precision drops by its degree only
    assert got.prec == a.prec - 1
    assert got.agrees_with(S(F2, "1+T^-1+T^-2+T^-3+O(T^-8)"), 7)


def test_inverse_of_linear():
    x = Laurent.from_poly(Poly.T(F3) + 1, 10).forget_exactness()
    inv = x.inverse()
    assert inv.lead == -1
    assert (inv * x).agrees_with(Laurent.from_poly(Poly.one(F3), 10), inv.prec - 1)


def test_inverse_of_zero():
    with pytest.raises(DivisionByZero):
        Laurent.zero(F2).inverse()
    with pytest.raises(UndeterminedToPrecision):
        S(F2, "O(T^-5)").inverse()


def test_exact_rational_refines():
    x = from_rational(Poly.one(F2), Poly.T(F2) + 1, 4)
    assert x.exact and x.is_rational()
    assert x.coeff(-40) == 1
    assert x.at_prec(50).prec == 50


def test_non_exact_coefficient_below_precision():
    x = S(F2, "T^-1+O(T^-4)")
    with pytest.raises(UndeterminedToPrecision):
        x.coeff(-6)


def test_zero_to_precision_degree():
    x = S(F2, "O(T^-4)")
    assert x.deg_upper() == -4
    with pytest.raises(UndeterminedToPrecision):
        x.norm_deg()
    assert Laurent.zero(F2).norm_deg() == NEG_INF


def test_mixed_exact_and_truncated():
    a = S(F3, "T^-1+O(T^-6)")
    b = from_rational(Poly.one(F3), Poly.T(F3), 2)
    assert (a - b).deg_upper() <= -6


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_field_laws_to_precision(seed, q):
    spec = field(q)
    rng = random.Random(seed)
    a, b, c = (random_unit_series(spec, rng, 30, rng.randrange(-3, 3)) for _ in range(3))
    lhs = (a + b) * c
    rhs = a * c + b * c
    p = min(lhs.prec, rhs.prec)
    assert lhs.agrees_with(rhs, p)
    inv = a.inverse()
    one = Laurent.from_poly(Poly.one(spec), 0)
    assert (a * inv).agrees_with(one, (a * inv).prec)


def test_spec_mismatch():
    with pytest.raises(SpecMismatch):
        Laurent.zero(F2) + Laurent.zero(F3)
    with pytest.raises(SpecMismatch):
        Vec2Laurent(Laurent.zero(F2), Laurent.zero(F3))


def test_split_integral_fractional():
    x = S(F3, "2*T^2+T^-1+O(T^-8)")
    ip, fp, d = split_integral_fractional(x)
    assert ip == Poly(F3, [0, 0, 2])
    assert d == -1 == frac_deg(x)
    assert integral_part(x) == ip
    P = Poly(F3, [1, 0, 1])
    ip, fp, d = split_integral_fractional(Laurent.from_poly(P, 3))
    assert ip == P and d == NEG_INF


def test_text_roundtrip():
    for text in ["T^-1+T^-3+O(T^-9)", "2*T^2+O(T^-3)", "O(T^-2)"]:
        assert format_series(parse_series(F3, text)) == text
    assert format_series(Laurent.zero(F2)) == "0"
    exact = parse_series(F2, "T+T^-2")
    assert exact.exact and exact.is_rational()
    with pytest.raises(ParseError):
        parse_series(F2, "T^-1+O(T^-2)+O(T^-3)")


def test_random_series_is_deterministic():
    a = random_series(F3, 5, 20, -1)
    b = random_series(F3, 5, 20, -1)
    assert a == b and a.prec == 20


def test_laurent_arith_dispatch():
    a = S(F2, "T^-1+O(T^-6)")
    assert laurent_arith(a, a, "add").deg_upper() <= -6
    assert laurent_arith(a, a, "mul").lead == -2
    assert Vec2Laurent(a, a).deg_upper() == -1
