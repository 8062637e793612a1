"""Exact arithmetic in F_q and F_q[T].

Field elements are encoded as integer codes ``0 <= code < q``: the base-``p``
digits of a code are the coefficients (low to high) of the element written
as a polynomial in the generator ``g`` of ``F_q = F_p[g]/(modulus)``.  For a
prime field the code is simply the residue.

Polynomials in ``T`` are immutable tuples of codes stored low to high with a
nonzero leading entry; the zero polynomial is the empty tuple and has degree
``NEG_INF``.  All norms are carried as base-``q`` exponents (degrees).
"""
from __future__ import annotations

import functools
import itertools
import math
import re

from . import kernels
from .errors import DivisionByZero, ParseError, PreconditionViolated, SpecMismatch

NEG_INF = -math.inf
"""Degree of the zero element: absorbs addition and loses every comparison."""

_TABLE_LIMIT = 256


def _is_prime(n):
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def _prime_power(q):
    """Return ``(p, m)`` with ``q == p**m`` or raise ``ValueError``."""
    if q < 2:
        raise ValueError(f"q={q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    m = 0
    r = q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1 or not _is_prime(p):
        raise ValueError(f"q={q} is not a prime power")
    return p, m


# -- dense arithmetic on digit lists over F_p (used for extension fields) --

def _trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _fp_polymod(a, mod, p):
    a = list(a)
    lm = len(mod)
    inv = pow(mod[-1], p - 2, p)
    for i in range(len(a) - lm, -1, -1):
        c = a[i + lm - 1] * inv % p
        if c:
            for j in range(lm):
                a[i + j] = (a[i + j] - c * mod[j]) % p
    return _trim(a[:lm - 1])


def _fp_irreducible(f, p):
    """Trial division by every monic polynomial of degree <= deg(f)/2."""
    n = len(f) - 1
    for d in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            g = list(low) + [1]
            if not _fp_polymod(f, g, p):
                return False
    return True


def default_modulus(p, m):
    """Lexicographically smallest monic irreducible of degree ``m`` over F_p.

    Candidates are ordered by their coefficient tuple read low to high.
    """
    for low in itertools.product(range(p), repeat=m):
        f = list(low) + [1]
        if f[0] == 0:
            continue
        if _fp_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # unreachable for m >= 1


class FieldSpec:
    """The finite field F_q with q = p**m, given by a modulus over F_p."""

    __slots__ = ("p", "m", "q", "modulus", "_add", "_mul", "_inv", "__weakref__")

    def __init__(self, p, m=1, modulus=None):
        if not _is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if m < 1:
            raise ValueError("m must be positive")
        self.p = p
        self.m = m
        self.q = p ** m
        if m == 1:
            self.modulus = None
        else:
            if modulus is None:
                modulus = default_modulus(p, m)
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if not _fp_irreducible(list(modulus), p):
                raise ValueError("modulus is reducible")
            self.modulus = modulus
        self._add = self._mul = self._inv = None
        if m > 1 and self.q <= _TABLE_LIMIT:
            self._build_tables()

    # identity
    def _key(self):
        return (self.p, self.m, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.m == 1:
            return f"FieldSpec(p={self.p})"
        return f"FieldSpec(p={self.p}, m={self.m}, modulus={self.modulus})"

    @property
    def is_prime(self):
        return self.m == 1

    # digit conversion
    def digits(self, code):
        p = self.p
        out = []
        for _ in range(self.m):
            code, d = divmod(code, p)
            out.append(d)
        return out

    def from_digits(self, digits):
        code = 0
        for d in reversed(list(digits)):
            code = code * self.p + (d % self.p)
        return code

    def _build_tables(self):
        q = self.q
        self._add = [[self._slow_add(a, b) for b in range(q)] for a in range(q)]
        self._mul = [[self._slow_mul(a, b) for b in range(q)] for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self._mul[a][b] == 1:
                    inv[a] = b
                    break
        self._inv = inv

    def _slow_add(self, a, b):
        p = self.p
        return self.from_digits([(x + y) % p for x, y in zip(self.digits(a), self.digits(b))])

    def _slow_mul(self, a, b):
        p = self.p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        prod = _fp_polymod([c % p for c in prod], self.modulus, p)
        return self.from_digits(prod + [0] * (self.m - len(prod)))

    # element arithmetic on codes
    def add(self, a, b):
        if self.m == 1:
            return (a + b) % self.p
        if self._add is not None:
            return self._add[a][b]
        return self._slow_add(a, b)

    def neg(self, a):
        if self.m == 1:
            return -a % self.p
        p = self.p
        return self.from_digits([-d % p for d in self.digits(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.m == 1:
            return a * b % self.p
        if self._mul is not None:
            return self._mul[a][b]
        return self._slow_mul(a, b)

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero in F_q")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        if self._inv is not None:
            return self._inv[a]
        return self.pow(a, self.q - 2)

    def pow(self, a, e):
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def elements(self):
        return range(self.q)

    def coerce(self, c):
        """Map an int to the prime subfield; codes are passed through."""
        if isinstance(c, FieldElement):
            if c.spec != self:
                raise SpecMismatch("field element from another field")
            return c.code
        return int(c) % self.p if self.m == 1 else int(c) % self.q

    # text format for coefficients
    def format_element(self, code):
        if self.m == 1:
            return str(code)
        terms = []
        for i, d in reversed(list(enumerate(self.digits(code)))):
            if d == 0:
                continue
            if i == 0:
                terms.append(str(d))
            else:
                mono = "g" if i == 1 else f"g^{i}"
                terms.append(mono if d == 1 else f"{d}*{mono}")
        return "+".join(terms) if terms else "0"


@functools.lru_cache(maxsize=None)
def field(q, modulus=None):
    """Cached :class:`FieldSpec` for ``F_q`` (default modulus unless given)."""
    p, m = _prime_power(q)
    return FieldSpec(p, m, modulus)


class FieldElement:
    """A single element of F_q, wrapping its integer code."""

    __slots__ = ("spec", "code")

    def __init__(self, spec, code):
        self.spec = spec
        self.code = spec.coerce(code)

    @property
    def repr(self):
        """Coefficient sequence over F_p, low to high, of length m."""
        return tuple(self.spec.digits(self.code))

    def _check(self, other):
        if not isinstance(other, FieldElement):
            other = FieldElement(self.spec, other)
        if other.spec != self.spec:
            raise SpecMismatch("operands belong to different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(self.spec, self.spec.add(self.code, other.code))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return FieldElement(self.spec, self.spec.sub(self.code, other.code))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(self.spec, self.spec.mul(self.code, other.code))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.code))

    def inverse(self):
        return FieldElement(self.spec, self.spec.inv(self.code))

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.code == other.code
        if isinstance(other, int):
            return self.code == self.spec.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return f"FieldElement({self.spec.format_element(self.code)!r})"


def field_arithmetic(a, b, op):
    """Apply ``op`` in {'add', 'sub', 'mul', 'inv', 'neg'} to field elements.

    ``b`` is ignored for the unary operations.
    """
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    if b.spec != a.spec:
        raise SpecMismatch("operands belong to different fields")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown field operation {op!r}")


# -- coefficient-list primitives, dispatching to kernels for prime fields --

def conv(spec, a, b):
    if spec.m == 1:
        return kernels.conv_mod(a, b, spec.p)
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    add, mul = spec.add, spec.mul
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = add(out[i + j], mul(x, y))
    return out


def poly_divmod_codes(spec, a, b):
    if spec.m == 1:
        return kernels.divmod_mod(a, b, spec.p)
    lb = len(b)
    if len(a) < lb:
        return [], list(a)
    inv = spec.inv(b[-1])
    r = list(a)
    qt = [0] * (len(a) - lb + 1)
    for i in range(len(a) - lb, -1, -1):
        c = spec.mul(r[i + lb - 1], inv)
        if c:
            qt[i] = c
            for j in range(lb):
                r[i + j] = spec.sub(r[i + j], spec.mul(c, b[j]))
    return qt, _trim(r[:lb - 1])


def inv_series(spec, c, n):
    """First ``n`` coefficients of the power-series inverse of ``c`` (c[0] != 0)."""
    if spec.m == 1:
        return kernels.inv_series_mod(c, n, spec.p)
    b0 = spec.inv(c[0])
    nb = spec.neg(b0)
    out = [b0] + [0] * (n - 1)
    for k in range(1, n):
        s = 0
        for i in range(1, min(k, len(c) - 1) + 1):
            s = spec.add(s, spec.mul(c[i], out[k - i]))
        out[k] = spec.mul(s, nb)
    return out


class Poly:
    """Immutable polynomial in F_q[T]."""

    __slots__ = ("spec", "c", "_hash")

    def __init__(self, spec, coeffs=()):
        c = [spec.coerce(x) for x in coeffs]
        self.spec = spec
        self.c = tuple(_trim(c))
        self._hash = None

    @classmethod
    def _raw(cls, spec, c):
        obj = cls.__new__(cls)
        obj.spec = spec
        obj.c = tuple(c)
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, spec):
        return cls._raw(spec, ())

    @classmethod
    def one(cls, spec):
        return cls._raw(spec, (1,))

    @classmethod
    def const(cls, spec, code):
        code = spec.coerce(code)
        return cls._raw(spec, (code,) if code else ())

    @classmethod
    def monomial(cls, spec, e, code=1):
        code = spec.coerce(code)
        if not code:
            return cls.zero(spec)
        return cls._raw(spec, (0,) * e + (code,))

    @classmethod
    def T(cls, spec):
        return cls.monomial(spec, 1)

    @classmethod
    def from_index(cls, spec, idx):
        """The polynomial whose base-q digits (low to high) are the coefficients."""
        q = spec.q
        c = []
        while idx:
            idx, d = divmod(idx, q)
            c.append(d)
        return cls._raw(spec, c)

    def index(self):
        """Inverse of :meth:`from_index`."""
        r = 0
        for x in reversed(self.c):
            r = r * self.spec.q + x
        return r

    @property
    def deg(self):
        return len(self.c) - 1 if self.c else NEG_INF

    @property
    def lc(self):
        return self.c[-1] if self.c else 0

    def is_zero(self):
        return not self.c

    def is_monic(self):
        return bool(self.c) and self.c[-1] == 1

    def __bool__(self):
        return bool(self.c)

    def coeff(self, i):
        return self.c[i] if 0 <= i < len(self.c) else 0

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.spec != self.spec:
                raise SpecMismatch("polynomials over different fields")
            return other
        if isinstance(other, (int, FieldElement)):
            return Poly.const(self.spec, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        spec = self.spec
        if spec.m == 1:
            p = spec.p
            out = [(x + y) % p for x, y in zip(a, b)]
            out.extend(a[len(b):])
            return Poly._raw(spec, _trim(out))
        add = spec.add
        out = list(a)
        for i, y in enumerate(b):
            out[i] = add(out[i], y)
        return Poly._raw(spec, _trim(out))

    __radd__ = __add__

    def __neg__(self):
        if self.spec.m == 1:
            p = self.spec.p
            return Poly._raw(self.spec, [-x % p for x in self.c])
        neg = self.spec.neg
        return Poly._raw(self.spec, [neg(x) for x in self.c])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Poly._raw(self.spec, _trim(conv(self.spec, list(self.c), list(other.c))))

    __rmul__ = __mul__

    def scale(self, code):
        code = self.spec.coerce(code)
        mul = self.spec.mul
        return Poly._raw(self.spec, _trim([mul(x, code) for x in self.c]))

    def shift(self, k):
        """Multiply by ``T**k`` (k >= 0)."""
        if not self.c:
            return self
        return Poly._raw(self.spec, (0,) * k + self.c)

    def __divmod__(self, other):
        return poly_divmod(self, other)

    def __floordiv__(self, other):
        return poly_divmod(self, other)[0]

    def __mod__(self, other):
        return poly_divmod(self, other)[1]

    def __pow__(self, e):
        r = Poly.one(self.spec)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def monic(self):
        if not self.c:
            return self
        return self.scale(self.spec.inv(self.c[-1]))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.spec == other.spec and self.c == other.c
        if isinstance(other, int):
            return self.c == Poly.const(self.spec, other).c
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self.c))
        return self._hash

    def __lt__(self, other):
        """Order by degree, then by coefficients from the top (deterministic tie-break)."""
        return (len(self.c), self.c[::-1]) < (len(other.c), other.c[::-1])

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


def poly_divmod(a, b):
    """Euclidean division ``a = quot*b + rem`` with ``deg rem < deg b``."""
    if not b.c:
        raise DivisionByZero("polynomial division by zero")
    if a.spec != b.spec:
        raise SpecMismatch("polynomials over different fields")
    qt, r = poly_divmod_codes(a.spec, list(a.c), list(b.c))
    return Poly._raw(a.spec, _trim(list(qt))), Poly._raw(a.spec, r)


def poly_xgcd(a, b):
    """Return ``(g, u, v)`` with ``g = u*a + v*b`` monic and equal to gcd(a, b)."""
    if not a.c and not b.c:
        raise PreconditionViolated("xgcd of (0, 0) is undefined")
    spec = a.spec
    r0, r1 = a, b
    s0, s1 = Poly.one(spec), Poly.zero(spec)
    t0, t1 = Poly.zero(spec), Poly.one(spec)
    while r1.c:
        qt, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
        t0, t1 = t1, t0 - qt * t1
    k = spec.inv(r0.lc)
    return r0.scale(k), s0.scale(k), t0.scale(k)


def poly_gcd(a, b):
    if not a.c and not b.c:
        return a
    return poly_xgcd(a, b)[0]


def norm_deg(x):
    """Base-q logarithm of ``|x|``; ``NEG_INF`` for an exact zero."""
    if isinstance(x, Poly):
        return x.deg
    return x.norm_deg()


def polys_of_degree_at_most(spec, d, nonzero=False):
    """All polynomials with degree <= d, in :meth:`Poly.from_index` order."""
    if d < 0:
        return [] if nonzero else [Poly.zero(spec)]
    start = 1 if nonzero else 0
    return [Poly.from_index(spec, i) for i in range(start, spec.q ** (d + 1))]


def monic_polys_of_degree(spec, d):
    return [Poly._raw(spec, _pad(Poly.from_index(spec, i).c, d) + (1,))
            for i in range(spec.q ** d)]


def _pad(c, n):
    return tuple(c) + (0,) * (n - len(c))


# -- text format --------------------------------------------------------------

def _format_terms(spec, items):
    """``items``: (exponent, code) pairs in decreasing exponent order."""
    parts = []
    for e, code in items:
        ctext = spec.format_element(code)
        if "+" in ctext:
            ctext = f"({ctext})"
        if e == 0:
            parts.append(ctext)
            continue
        mono = "T" if e == 1 else f"T^{e}"
        parts.append(mono if code == 1 else f"{ctext}*{mono}")
    return "+".join(parts)


def format_poly(P):
    items = [(e, x) for e, x in reversed(list(enumerate(P.c))) if x]
    return _format_terms(P.spec, items) or "0"


def _split_top(s, sep="+"):
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced parentheses in {s!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError(f"unbalanced parentheses in {s!r}")
    parts.append("".join(cur))
    return parts


_INT = re.compile(r"\d+")
_POW = re.compile(r"^([gT])(?:\^(-?\d+))?$")


def _parse_element(spec, text):
    """Parse a g-polynomial (or an integer for prime fields) into a code."""
    total = 0
    for term in _split_top(text):
        if not term:
            raise ParseError(f"empty term in {text!r}")
        coef, e = 1, 0
        for f in term.split("*"):
            if _INT.fullmatch(f):
                coef *= int(f)
                continue
            m = _POW.match(f)
            if not m or m.group(1) != "g":
                raise ParseError(f"bad coefficient factor {f!r}")
            e += int(m.group(2) or 1)
        if spec.m == 1:
            if e:
                raise ParseError("generator g is only meaningful for extension fields")
            total = spec.add(total, coef % spec.p)
            continue
        if e < 0:
            raise ParseError("negative power of g")
        digits = [0] * max(spec.m, e + 1)
        digits[e] = coef % spec.p
        red = _fp_polymod(digits, spec.modulus, spec.p) if e >= spec.m else _trim(digits)
        total = spec.add(total, spec.from_digits(red + [0] * (spec.m - len(red))))
    return total


def parse_terms(spec, text):
    """Parse ``c*T^e`` terms into a dict exponent -> code (like terms summed)."""
    s = "".join(text.split())
    if not s:
        raise ParseError("empty polynomial text")
    out = {}
    for term in _split_top(s):
        if not term:
            raise ParseError(f"empty term in {text!r}")
        factors = _split_top(term, "*")
        e = 0
        coef = 1
        seen_t = False
        for f in factors:
            m = _POW.match(f)
            if m and m.group(1) == "T":
                if seen_t:
                    raise ParseError(f"repeated T factor in {term!r}")
                seen_t = True
                e = int(m.group(2) or 1)
                continue
            if f.startswith("(") and f.endswith(")"):
                f = f[1:-1]
            coef = spec.mul(coef, _parse_element(spec, f))
        out[e] = spec.add(out.get(e, 0), coef)
    return {e: c for e, c in out.items() if c}


def parse_poly(spec, text):
    terms = parse_terms(spec, text)
    if any(e < 0 for e in terms):
        raise ParseError("negative exponent in a polynomial")
    if not terms:
        return Poly.zero(spec)
    c = [0] * (max(terms) + 1)
    for e, x in terms.items():
        c[e] = x
    return Poly._raw(spec, c)
