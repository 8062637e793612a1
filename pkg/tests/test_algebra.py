import pytest
from hypothesis import given, settings, strategies as st

from fqapprox.algebra import (
    FieldElement,
    Poly,
    default_modulus,
    field,
    field_arithmetic,
    format_poly,
    monic_polys_of_degree,
    parse_poly,
    poly_divmod,
    poly_gcd,
    poly_xgcd,
    polys_of_degree_at_most,
)
from fqapprox.errors import DivisionByZero, ParseError, PreconditionViolated, SpecMismatch

FIELDS = [2, 3, 4, 5, 8, 9]


def polys(q, max_deg=8):
    spec = field(q)
    return st.lists(st.integers(0, q - 1), max_size=max_deg + 1).map(lambda c: Poly(spec, c))


@pytest.mark.parametrize("p,m,expected", [(2, 2, (1, 1, 1)), (2, 3, (1, 0, 1, 1)), (3, 2, (1, 0, 1))])
def test_default_modulus_is_smallest_irreducible(p, m, expected):
    assert tuple(default_modulus(p, m)) == expected


@pytest.mark.parametrize("q", FIELDS)
def test_field_axioms(q):
    F = field(q)
    for a in F.elements():
        assert F.add(a, F.neg(a)) == 0
        assert F.mul(a, 1) == a
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(a, q - 1) == 1
        for b in F.elements():
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)


def test_field_inverse_of_zero():
    with pytest.raises(DivisionByZero):
        field(4).inv(0)


def test_field_element_operators():
    F = field(9)
    g = FieldElement(F, 3)
    assert (g * g.inverse()).code == 1
    assert (g - g).code == 0
    assert field_arithmetic(g, FieldElement(F, 1), "add") == g + FieldElement(F, 1)
    with pytest.raises(SpecMismatch):
        g + FieldElement(field(3), 1)


@pytest.mark.parametrize("q", [2, 3, 4])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_ring_laws(q, data):
    a, b, c = (data.draw(polys(q)) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a - b) + b == a
    if b:
        qt, r = poly_divmod(a, b)
        assert qt * b + r == a
        assert r.deg < b.deg


@pytest.mark.parametrize("q", [2, 3, 5, 4])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_xgcd(q, data):
    a, b = data.draw(polys(q)), data.draw(polys(q))
    if not a and not b:
        with pytest.raises(PreconditionViolated):
            poly_xgcd(a, b)
        return
    g, u, v = poly_xgcd(a, b)
    assert u * a + v * b == g
    assert g.is_monic()
    assert not (a % g) and not (b % g)


def test_divide_by_zero():
    F = field(2)
    with pytest.raises(DivisionByZero):
        poly_divmod(Poly.T(F), Poly.zero(F))


def test_index_roundtrip_and_order():
    F = field(3)
    ps = polys_of_degree_at_most(F, 2)
    assert len(ps) == 27
    assert [p.index() for p in ps] == list(range(27))
    assert sorted(reversed(ps)) == sorted(ps)
    assert all(p.is_monic() and p.deg == 2 for p in monic_polys_of_degree(F, 2))
    assert len(monic_polys_of_degree(F, 2)) == 9


def test_gcd_of_zero_pair_is_zero():
    F = field(2)
    assert not poly_gcd(Poly.zero(F), Poly.zero(F))


@pytest.mark.parametrize("q", [2, 3, 4, 9])
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_format_parse_roundtrip(q, data):
    a = data.draw(polys(q))
    assert parse_poly(field(q), format_poly(a)) == a


def test_parse_examples():
    F = field(3)
    assert parse_poly(F, "2*T^2+T+1") == Poly(F, [1, 1, 2])
    assert parse_poly(F, "0") == Poly.zero(F)
    F4 = field(4)
    assert parse_poly(F4, "g*T+1") == Poly(F4, [1, 2])
    with pytest.raises(ParseError):
        parse_poly(F, "T^^2")
