"""Truncated Laurent series in 1/T with rigorous precision tracking.

A :class:`Laurent` stores coefficients for exponents ``-prec .. lead``.  Every
stored coefficient is certain; nothing is known below ``-prec`` unless the
series is *exact*, i.e. carries a closure that recomputes it to any precision
(rational-backed series additionally remember their numerator/denominator).
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import (
    NEG_INF,
    Poly,
    conv,
    field,
    inv_series,
    parse_terms,
    poly_divmod,
    poly_gcd,
    _format_terms,
    _split_top,
)
from .errors import DivisionByZero, ParseError, SpecMismatch, UndeterminedToPrecision

REFINE_CAP = 1 << 14
"""Largest precision an exact series is refined to while hunting a nonzero coefficient."""


def _strip(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


class Laurent:
    __slots__ = ("spec", "low", "c", "_refine", "_ratio")

    def __init__(self, spec, low, coeffs, refine=None, ratio=None):
        self.spec = spec
        self.low = low
        self.c = tuple(_strip(coeffs))
        self._refine = refine
        self._ratio = ratio

    # -- basic attributes ------------------------------------------------
    @property
    def prec(self):
        return -self.low

    @property
    def exact(self):
        return self._refine is not None

    @property
    def ratio(self):
        """``(P, Q)`` with Q monic and gcd 1 for rational-backed series, else None."""
        return self._ratio

    def is_rational(self):
        return self._ratio is not None

    @property
    def lead(self):
        """Exponent of the leading known nonzero coefficient (NEG_INF if none)."""
        return self.low + len(self.c) - 1 if self.c else NEG_INF

    def zero_to_precision(self):
        return not self.c

    def lead_eff(self):
        """Leading exponent, or ``low - 1`` for a series that is zero to precision."""
        return self.low + len(self.c) - 1 if self.c else self.low - 1

    def deg_upper(self):
        """An upper bound for the degree valid without refinement."""
        if self.c:
            return self.lead
        if self._ratio is not None and not self._ratio[0]:
            return NEG_INF
        return self.low - 1

    def coeff(self, e):
        if e < self.low:
            if self.exact:
                return self.at_prec(-e).coeff(e)
            raise UndeterminedToPrecision(f"coefficient of T^{e} lies below the precision")
        i = e - self.low
        return self.c[i] if i < len(self.c) else 0

    def coeffs_desc(self):
        """Coefficients from the leading exponent down to ``-prec``."""
        return list(reversed(self.c))

    # -- precision management --------------------------------------------
    def truncate(self, prec):
        """Forget coefficients below ``-prec`` (no-op when already coarser)."""
        if prec >= self.prec:
            return self
        cut = -prec - self.low
        return Laurent(self.spec, -prec, self.c[cut:], self._refine, self._ratio)

    def at_prec(self, prec):
        """This series with precision exactly ``prec``.

        Exact series are recomputed when more precision is requested; other
        series raise :class:`UndeterminedToPrecision`.
        """
        if prec <= self.prec:
            return self.truncate(prec)
        if self._refine is None:
            raise UndeterminedToPrecision(
                f"series known to precision {self.prec}, {prec} requested")
        return self._refine(prec)

    def forget_exactness(self):
        return Laurent(self.spec, self.low, self.c)

    def norm_deg(self):
        """log_q |x|; exact series are refined until a nonzero coefficient shows up."""
        if self.c:
            return self.lead
        if self._ratio is not None:
            if not self._ratio[0]:
                return NEG_INF
            return self.at_prec(self.prec + self._ratio[1].deg + 1).lead
        if self._refine is not None:
            p = self.prec
            while p < REFINE_CAP:
                p = min(REFINE_CAP, max(2 * p, p + 32))
                r = self._refine(p)
                if r.c:
                    return r.lead
        raise UndeterminedToPrecision("all known coefficients vanish")

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, spec):
        return cls.from_poly(Poly.zero(spec), 0)

    @classmethod
    def from_poly(cls, P, prec):
        return _rational_series(P, Poly.one(P.spec), prec)

    @classmethod
    def monomial(cls, spec, e, prec, code=1):
        """Exact ``code * T^e``."""
        if e >= 0:
            return cls.from_poly(Poly.monomial(spec, e, code), prec)
        return from_rational(Poly.const(spec, code), Poly.monomial(spec, -e), prec)

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Laurent):
            if other.spec != self.spec:
                raise SpecMismatch("series over different fields")
            return other
        if isinstance(other, Poly):
            if other.spec != self.spec:
                raise SpecMismatch("series over different fields")
            return Laurent.from_poly(other, max(self.prec, 0))
        if isinstance(other, int):
            return Laurent.from_poly(Poly.const(self.spec, other), max(self.prec, 0))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _binary(self, other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _binary(self, other, "sub")

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _binary(other, self, "sub")

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _binary(self, other, "mul")

    __rmul__ = __mul__

    def __neg__(self):
        neg = self.spec.neg
        ratio = None
        if self._ratio is not None:
            ratio = (-self._ratio[0], self._ratio[1])
        refine = None
        if self._refine is not None:
            src = self._refine
            refine = lambda pr: -src(pr)  # noqa: E731
        return Laurent(self.spec, self.low, [neg(x) for x in self.c], refine, ratio)

    def inverse(self):
        return laurent_inv(self)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * laurent_inv(other)

    def shift(self, k):
        """Multiply by ``T**k`` (any integer k); exact-preserving and lossless."""
        if k == 0:
            return self
        ratio = None
        if self._ratio is not None:
            P, Q = self._ratio
            ratio = (P.shift(k), Q) if k > 0 else _reduce(P, Q.shift(-k))
        refine = None
        if self._refine is not None:
            src = self._refine
            refine = lambda pr: src(pr + k).shift(k)  # noqa: E731
        return Laurent(self.spec, self.low + k, self.c, refine, ratio)

    # -- comparison and text -------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Laurent):
            return NotImplemented
        return self.spec == other.spec and self.low == other.low and self.c == other.c

    def __hash__(self):
        return hash((self.spec, self.low, self.c))

    def agrees_with(self, other, prec=None):
        """Do the two series share every coefficient down to ``-prec``?"""
        if prec is None:
            prec = min(self.prec, other.prec)
        return self.at_prec(prec).c == other.at_prec(prec).c

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        tag = " exact" if self.exact else ""
        return f"Laurent({format_series(self)!r}{tag})"


# -- rational-backed construction ----------------------------------------

def _reduce(P, Q):
    if not Q:
        raise DivisionByZero("rational series with zero denominator")
    g = poly_gcd(P, Q) if P else Q
    if g.deg > 0:
        P = poly_divmod(P, g)[0]
        Q = poly_divmod(Q, g)[0]
    k = Q.spec.inv(Q.lc)
    return P.scale(k), Q.scale(k)


def _expand_rational(P, Q, prec):
    """Coefficients (low, list) of P/Q for exponents >= -prec."""
    pos = max(prec, 0)
    num = P.shift(pos)
    if Q.deg == 0 and Q.lc == 1:
        quot = num
    else:
        quot, _ = poly_divmod(num, Q)
    low = -pos
    c = list(quot.c)
    if prec < pos:
        cut = pos - prec
        c = c[cut:]
        low = -prec
    return low, c


def from_rational(P, Q, prec):
    """Exact expansion of ``P/Q`` known to precision ``prec``."""
    if not Q:
        raise DivisionByZero("rational series with zero denominator")
    P, Q = _reduce(P, Q)
    return _rational_series(P, Q, prec)


def _rational_series(P, Q, prec):
    low, c = _expand_rational(P, Q, prec)
    return Laurent(P.spec, low, c, lambda pr: _rational_series(P, Q, pr), (P, Q))


# -- core precision-tracked arithmetic -------------------------------------

def _raw_add(a, b, negate_b=False):
    spec = a.spec
    low = max(a.low, b.low)
    ca = a.c[low - a.low:] if low > a.low else a.c
    cb = b.c[low - b.low:] if low > b.low else b.c
    if negate_b:
        cb = [spec.neg(x) for x in cb]
    n = max(len(ca), len(cb))
    add = spec.add
    out = [0] * n
    for i, x in enumerate(ca):
        out[i] = x
    for i, y in enumerate(cb):
        out[i] = add(out[i], y)
    return Laurent(spec, low, out)


def _raw_mul(a, b):
    low = max(a.lead_eff() + b.low, b.lead_eff() + a.low)
    if not a.c or not b.c:
        return Laurent(a.spec, low, ())
    prod = conv(a.spec, list(a.c), list(b.c))
    base = a.low + b.low
    return Laurent(a.spec, low, prod[low - base:] if low > base else prod)


def _raw_inv(a):
    if not a.c:
        raise UndeterminedToPrecision("inverse of a series that is zero to precision")
    L = a.lead
    n = len(a.c)
    rev = list(reversed(a.c))
    out = inv_series(a.spec, rev, n)
    # exponents -L down to -L-n+1
    return Laurent(a.spec, -L - n + 1, list(reversed(out)))


def _raw(a, b, op):
    if op == "add":
        return _raw_add(a, b)
    if op == "sub":
        return _raw_add(a, b, negate_b=True)
    return _raw_mul(a, b)


def _exact_loop(fn, operands, prec):
    """Evaluate ``fn`` on refinements of exact operands until ``prec`` is certified."""
    extra = 0
    while True:
        r = fn(*[o.at_prec(prec + extra) for o in operands])
        if r.prec >= prec:
            return r.truncate(prec)
        gap = prec - r.prec
        extra += max(gap, extra, 1)
        if prec + extra > REFINE_CAP * 4:
            raise UndeterminedToPrecision("refinement did not converge")


def _binary(a, b, op):
    spec = a.spec
    if a._ratio is not None and b._ratio is not None:
        (P1, Q1), (P2, Q2) = a._ratio, b._ratio
        if op == "add":
            num, den = P1 * Q2 + P2 * Q1, Q1 * Q2
        elif op == "sub":
            num, den = P1 * Q2 - P2 * Q1, Q1 * Q2
        else:
            num, den = P1 * P2, Q1 * Q2
        return from_rational(num, den, min(a.prec, b.prec))
    if a.exact and b.exact:
        fn = lambda x, y: _raw(x, y, op)  # noqa: E731
        refine = lambda pr: _exact_loop(fn, (a, b), pr)  # noqa: E731
        r = refine(min(a.prec, b.prec))
        return Laurent(spec, r.low, r.c, refine)
    if a.exact or b.exact:
        # let the non-exact operand limit the precision
        ex, nx = (a, b) if a.exact else (b, a)
        if op == "mul":
            need = nx.prec - ex.lead_eff() + nx.lead_eff()
            if not ex.c and ex._ratio is None:
                try:
                    ex = ex.at_prec(ex.prec + 64)
                except UndeterminedToPrecision:
                    pass
                need = nx.prec - ex.lead_eff() + nx.lead_eff()
        else:
            need = nx.prec
        ex = ex.at_prec(max(ex.prec, need))
        a, b = (ex, nx) if a.exact else (nx, ex)
        r = _raw(a, b, op)
        return Laurent(spec, r.low, r.c)
    return _raw(a, b, op)


def laurent_arith(a, b, op):
    """``op`` in {'add', 'sub', 'mul'} with certified output precision."""
    if op not in ("add", "sub", "mul"):
        raise ValueError(f"unknown series operation {op!r}")
    if a.spec != b.spec:
        raise SpecMismatch("series over different fields")
    return _binary(a, b, op)


def laurent_inv(a):
    """Multiplicative inverse; precision out = 2*lead + precision in."""
    if a._ratio is not None:
        P, Q = a._ratio
        if not P:
            raise DivisionByZero("inverse of zero")
        return from_rational(Q, P, max(a.prec, 2 * P.deg - 2 * Q.deg + a.prec))
    if a.exact:
        src = a
        if not a.c:
            src.norm_deg()  # raises if no nonzero coefficient within the cap
            p = a.prec
            while not src.c:
                p = 2 * p + 32
                src = a.at_prec(p)
        L = src.lead
        refine = lambda pr: _exact_loop(_raw_inv, (a,), pr)  # noqa: E731
        r = refine(max(src.prec, 2 * L + src.prec))
        return Laurent(a.spec, r.low, r.c, refine)
    return _raw_inv(a)


def split_integral_fractional(x):
    """Return ``([x], <x>, deg <x>)``.

    The fractional part inherits exactness; its degree is NEG_INF exactly
    when x is a polynomial, and undetermined (raises) for a non-exact
    series whose known fractional coefficients all vanish.
    """
    spec = x.spec
    if x._ratio is not None:
        P, Q = x._ratio
        ip, rem = poly_divmod(P, Q)
        fp = _rational_series(rem, Q, max(x.prec, 1))
        return ip, fp, fp.norm_deg()
    if x.prec < 0:
        if not x.exact:
            raise UndeterminedToPrecision("integral part not determined at negative precision")
        x = x.at_prec(1)
    ip_c = x.c[-x.low:] if x.low <= 0 else ()
    ip = Poly._raw(spec, _strip(ip_c))
    frac = Laurent(spec, x.low, x.c[:-x.low] if x.low < 0 else ())
    if x.exact:
        src = x
        refine = lambda pr: split_integral_fractional(src.at_prec(max(pr, 1)))[1].truncate(pr)  # noqa: E731
        frac = Laurent(spec, frac.low, frac.c, refine)
    return ip, frac, frac.norm_deg()


def integral_part(x):
    """``[x]`` alone; unlike :func:`split_integral_fractional` it never inspects ``<x>``."""
    if x._ratio is not None:
        P, Q = x._ratio
        return poly_divmod(P, Q)[0]
    if x.prec < 0:
        if not x.exact:
            raise UndeterminedToPrecision("integral part not determined at negative precision")
        x = x.at_prec(1)
    return Poly._raw(x.spec, _strip(x.c[-x.low:] if x.low <= 0 else ()))


def frac_deg(x):
    """log_q of the distance from x to the nearest polynomial."""
    return split_integral_fractional(x)[2]


def random_series(spec, seed, prec, lead):
    """Non-exact series with i.i.d. uniform coefficients at exponents ``lead .. -prec``.

    The leading coefficient is uniform as well, so it may vanish.
    """
    rng = random.Random(seed)
    q = spec.q
    n = prec + lead + 1
    c = [rng.randrange(q) for _ in range(max(n, 0))]
    return Laurent(spec, -prec, c)


def random_unit_series(spec, rng, prec, lead):
    """Like :func:`random_series` but with a nonzero leading coefficient."""
    q = spec.q
    n = prec + lead + 1
    c = [rng.randrange(q) for _ in range(n - 1)] + [rng.randrange(1, q)]
    return Laurent(spec, -prec, c)


@dataclass(frozen=True)
class Vec2Laurent:
    c1: Laurent
    c2: Laurent

    def __post_init__(self):
        if self.c1.spec != self.c2.spec:
            raise SpecMismatch("vector components over different fields")

    @property
    def spec(self):
        return self.c1.spec

    def norm_deg(self):
        return max(self.c1.norm_deg(), self.c2.norm_deg())

    def deg_upper(self):
        return max(self.c1.deg_upper(), self.c2.deg_upper())

    def __sub__(self, other):
        return Vec2Laurent(self.c1 - other.c1, self.c2 - other.c2)


# -- text format -----------------------------------------------------------

def format_series(x):
    items = [(x.low + i, v) for i, v in reversed(list(enumerate(x.c))) if v]
    body = _format_terms(x.spec, items)
    marker = f"O(T^{x.low - 1})"
    if x.exact and x._ratio is not None and not x.c and not x._ratio[0]:
        return "0"
    return f"{body}+{marker}" if body else marker


def parse_series(spec, text):
    """Parse the series text format; without an ``O(...)`` term the value is exact."""
    s = "".join(text.split())
    parts = _split_top(s)
    marker = [p for p in parts if p.startswith("O(")]
    body = "+".join(p for p in parts if not p.startswith("O("))
    if len(marker) > 1:
        raise ParseError("more than one precision marker")
    terms = parse_terms(spec, body) if body else {}
    if marker:
        m = marker[0]
        if not m.endswith(")"):
            raise ParseError(f"bad precision marker {m!r}")
        inner = m[2:-1]
        if inner == "1":
            e = 0
        elif inner.startswith("T^"):
            try:
                e = int(inner[2:])
            except ValueError as exc:
                raise ParseError(f"bad precision marker {m!r}") from exc
        elif inner == "T":
            e = 1
        else:
            raise ParseError(f"bad precision marker {m!r}")
        prec = -e - 1
        if any(k < -prec for k in terms):
            raise ParseError("term below the precision marker")
        low = -prec
        top = max(terms) if terms else low
        c = [0] * (top - low + 1)
        for k, v in terms.items():
            c[k - low] = v
        return Laurent(spec, low, c)
    if not terms:
        return Laurent.zero(spec)
    shift = max(0, -min(terms))
    num_c = [0] * (max(terms) + shift + 1)
    for k, v in terms.items():
        num_c[k + shift] = v
    num = Poly._raw(spec, _strip(num_c))
    prec = max(shift, 1)
    return from_rational(num, Poly.monomial(spec, shift), prec)


def series_spec(q, modulus=None):
    return field(q, modulus)
