"""Continued fractions of Laurent series: expansion, evaluation and identity checks.

Convergents follow ``P_k = A_k P_{k-1} + P_{k-2}`` (same for Q) seeded with
``P_{-2}=0, P_{-1}=1, Q_{-2}=1, Q_{-1}=0``.

Trust: the quotients ``A_1..A_k`` of a series known to precision ``prec`` are
certified when ``2 deg Q_k <= prec``; the *degree* of ``A_k`` is certified
under the weaker ``deg Q_{k-1} + deg Q_k <= prec``.  Non-exact inputs emit
quotients up to the degree-certified count.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .algebra import Poly, format_poly, parse_poly, poly_divmod, _split_top
from .errors import InsufficientTrust, ParseError, PreconditionViolated, UndeterminedToPrecision
from .laurent import Laurent, from_rational, split_integral_fractional, REFINE_CAP
from . import scan


@dataclass
class CFExpansion:
    a0: Poly
    quotients: list
    convP: list  # convP[i] is P_{i-2}
    convQ: list
    trusted: int
    terminated: bool
    deg_trusted: int = 0
    prec: float = 0

    def P(self, k):
        return self.convP[k + 2]

    def Q(self, k):
        return self.convQ[k + 2]

    def dQ(self, k):
        return self.convQ[k + 2].deg

    @property
    def n(self):
        """Number of emitted quotients."""
        return len(self.quotients)

    @property
    def spec(self):
        return self.a0.spec

    def degrees(self):
        return [A.deg for A in self.quotients]

    def __str__(self):
        return format_cf(self.a0, self.quotients)


def _convergents(a0, quotients):
    spec = a0.spec
    P = [Poly.zero(spec), Poly.one(spec)]
    Q = [Poly.one(spec), Poly.zero(spec)]
    for A in [a0] + list(quotients):
        P.append(A * P[-1] + P[-2])
        Q.append(A * Q[-1] + Q[-2])
    return P, Q


def _euclid(num, den, max_terms):
    """Quotients of num/den; returns (a0, quotients, finished)."""
    a0, r = poly_divmod(num, den)
    quotients = []
    a, b = den, r
    while b and len(quotients) < max_terms:
        A, r = poly_divmod(a, b)
        quotients.append(A)
        a, b = b, r
    return a0, quotients, not b


def _build(a0, quotients, prec, exact, finished):
    P, Q = _convergents(a0, quotients)
    degs = [q.deg for q in Q]  # degs[k+2] = deg Q_k
    n = len(quotients)
    if exact:
        trusted = deg_trusted = n
    else:
        trusted = 0
        deg_trusted = 0
        for k in range(1, n + 1):
            if 2 * degs[k + 2] <= prec:
                trusted = k
            if degs[k + 1] + degs[k + 2] <= prec:
                deg_trusted = k
    return CFExpansion(a0, list(quotients), P, Q, trusted, finished and exact,
                       deg_trusted, prec)


def cf_expand(x, max_terms=64):
    """Continued fraction of ``x`` with at most ``max_terms`` quotients.

    Rational-backed inputs run polynomial Euclid exactly; other exact inputs
    are refined until ``max_terms`` quotients are certified (or a precision
    cap is hit); non-exact inputs are expanded through their truncation and
    cut at the last quotient whose degree is certified.
    """
    if x.ratio is not None:
        num, den = x.ratio
        a0, qs, finished = _euclid(num, den, max_terms)
        cf = _build(a0, qs, float("inf"), True, finished)
        cf.prec = x.prec
        return cf
    if x.exact:
        prec = max(x.prec, 2)
        while True:
            cf = _expand_truncation(x.at_prec(prec), max_terms + 1)
            if cf.trusted >= max_terms or prec >= REFINE_CAP:
                break
            prec = min(REFINE_CAP, 2 * prec)
        k = min(cf.trusted, max_terms)
        out = _build(cf.a0, cf.quotients[:k], prec, True, False)
        out.prec = prec
        return out
    if x.prec < 2:
        raise PreconditionViolated("continued fraction needs precision >= 2")
    return _expand_truncation(x, max_terms)


def _expand_truncation(x, max_terms):
    spec = x.spec
    prec = x.prec
    c = list(x.c)
    num = Poly._raw(spec, c)  # x * T^prec with the known coefficients
    while num.c and num.c[-1] == 0:
        num = Poly._raw(spec, num.c[:-1])
    den = Poly.monomial(spec, prec)
    a0, qs, finished = _euclid(num, den, max_terms)
    cf = _build(a0, qs, prec, False, False)
    if finished and not qs and not x.exact:
        # the fractional part vanishes to precision: nothing certifiable
        raise UndeterminedToPrecision("fractional part is zero to precision")
    k = cf.deg_trusted
    if k < len(qs):
        cf = _build(a0, qs[:k], prec, False, False)
    return cf


class _CFSource:
    """Lazily extended convergents for an endless quotient stream."""

    def __init__(self, a0, quotients):
        self.a0 = a0
        self.it = iter(quotients)
        self.qs = []
        self.P, self.Q = _convergents(a0, [])
        self.done = False
        self.lock = threading.Lock()

    def _pull(self):
        try:
            A = next(self.it)
        except StopIteration:
            self.done = True
            return False
        if A.deg < 1:
            raise PreconditionViolated("partial quotients must have positive degree")
        self.qs.append(A)
        self.P.append(A * self.P[-1] + self.P[-2])
        self.Q.append(A * self.Q[-1] + self.Q[-2])
        return True

    def series(self, prec):
        with self.lock:
            # need deg Q_n + deg Q_{n+1} >= prec + 1 for P_n/Q_n to agree to prec
            while not self.done:
                n = len(self.qs)
                if n >= 1 and self.Q[-2].deg + self.Q[-1].deg >= prec + 1:
                    P, Q = self.P[-2], self.Q[-2]
                    break
                self._pull()
            else:
                P, Q = self.P[-1], self.Q[-1]
        r = from_rational(P, Q, prec)
        return Laurent(r.spec, r.low, r.c, self.series)


def cf_eval(a0, quotients, prec):
    """Series with the given continued fraction, known to precision ``prec``.

    A list or tuple gives the rational ``P_n/Q_n``; any other iterable is
    treated as an endless stream and gives an exact, lazily refined series.
    """
    if isinstance(quotients, (list, tuple)):
        for A in quotients:
            if A.deg < 1:
                raise PreconditionViolated("partial quotients must have positive degree")
        P, Q = _convergents(a0, quotients)
        return from_rational(P[-1], Q[-1], prec)
    return _CFSource(a0, quotients).series(prec)


def repeat_quotient(A):
    """Endless stream ``A, A, A, ...``."""
    return itertools.repeat(A)


# -- identity checks -----------------------------------------------------

@dataclass
class IdentityRecord:
    k: int
    check: str
    lhs: object
    rhs: object
    holds: bool | None  # None: inconclusive


@dataclass
class IdentityReport:
    records: list = dc_field(default_factory=list)

    @property
    def falsifications(self):
        return [r for r in self.records if r.holds is False]

    @property
    def inconclusive(self):
        return [r for r in self.records if r.holds is None]

    @property
    def ok(self):
        return not self.falsifications

    def add(self, k, check, lhs, rhs, holds):
        self.records.append(IdentityRecord(k, check, lhs, rhs, holds))


def cf_identity_report(cf, x, exhaustive_deg=None):
    """Check the convergent identities of ``cf`` against ``x``.

    Always checks, for every certified k: the error identity
    ``deg(Q_k x - P_k) = -deg Q_{k+1}``, the degree sum
    ``deg Q_k = sum deg A_i`` and the determinant ``(-1)^k``.  With
    ``exhaustive_deg`` set, every Q with ``deg Q <= exhaustive_deg`` is also
    scanned: small errors must come from convergents, and no Q below
    ``Q_{n+1}`` may beat ``Q_n``.
    """
    if cf.trusted < 2 and not cf.terminated:
        raise InsufficientTrust(f"only {cf.trusted} certified quotients")
    spec = cf.spec
    rep = IdentityReport()
    one = spec.coerce(1)
    minus_one = spec.neg(one)
    last = cf.n if cf.terminated else min(cf.trusted, cf.deg_trusted - 1)
    for k in range(0, last + 1):
        if cf.terminated and k == cf.n:
            continue
        err = x * cf.Q(k) - cf.P(k)
        try:
            lhs = err.norm_deg()
        except UndeterminedToPrecision:
            rep.add(k, "error_identity", None, -cf.dQ(k + 1), None)
            continue
        rep.add(k, "error_identity", lhs, -cf.dQ(k + 1), lhs == -cf.dQ(k + 1))
    total = 0
    for k in range(1, cf.n + 1):
        total += cf.quotients[k - 1].deg
        rep.add(k, "degree_sum", cf.dQ(k), total, cf.dQ(k) == total)
    for k in range(0, cf.n + 1):
        d = cf.Q(k) * cf.P(k - 1) - cf.P(k) * cf.Q(k - 1)
        want = Poly.const(spec, one if k % 2 == 0 else minus_one)
        rep.add(k, "determinant", d, want, d == want)
    if exhaustive_deg is not None:
        _exhaustive_checks(cf, x, exhaustive_deg, rep)
    return rep


def _exhaustive_checks(cf, x, D, rep):
    spec = cf.spec
    degs, window = scan.frac_degrees_all(x, D)
    floor = -window - 1  # degrees recorded as this value are only bounded above
    convs = {}
    for k in range(0, cf.trusted + 1):
        Qk = cf.Q(k)
        convs[Qk.monic()] = k
    top_trusted = cf.dQ(cf.trusted)
    # Legendre: small error forces a convergent
    for idx in range(1, len(degs)):
        Q = Poly.from_index(spec, idx)
        e = int(degs[idx])
        if e == floor:
            # true degree is only known to be <= floor
            if floor >= -Q.deg:
                rep.add(-1, "legendre", str(Q), None, None)
                continue
        elif e >= -Q.deg:
            continue
        P = split_integral_fractional(x * Q)[0]
        g = _gcd_monic(P, Q)
        Qr = poly_divmod(Q, g)[0].monic()
        if Qr in convs:
            k = convs[Qr]
            Pk, Qk = cf.P(k), cf.Q(k)
            holds = P * Qk == Pk * Q
            rep.add(k, "legendre", str(Q), str(Qk), holds)
        elif Qr.deg > top_trusted:
            rep.add(-1, "legendre", str(Q), None, None)
        else:
            rep.add(-1, "legendre", str(Q), None, False)
    # second-kind optimality
    for n in range(0, cf.trusted + 1):
        if n + 1 > cf.deg_trusted and not cf.terminated:
            break
        if cf.terminated and n >= cf.n:
            break
        dn1 = cf.dQ(n + 1)
        bound = min(D, dn1 - 1)
        if bound < 0:
            continue
        target = -dn1
        worst = None
        holds = True
        for idx in range(1, spec.q ** (bound + 1)):
            # a degree recorded at the floor is <= floor, so it beats the
            # target whenever floor < target
            if int(degs[idx]) < target:
                holds = False
                worst = str(Poly.from_index(spec, idx))
                break
        rep.add(n, "second_kind", worst, target, holds)


def _gcd_monic(a, b):
    from .algebra import poly_gcd
    return poly_gcd(a, b)


# -- exponent prefix ---------------------------------------------------------

@dataclass
class OmegaProfile:
    ratios: list
    running_max: list
    terminated: bool = False

    def estimate(self):
        """Largest ratio over the later half of the prefix (early ratios are noise)."""
        if not self.ratios:
            return None
        return max(self.ratios[len(self.ratios) // 2:])


def omega_profile(cf):
    """Exact ratios ``deg Q_{k+1} / deg Q_k`` over the certified prefix."""
    if cf.terminated:
        return OmegaProfile([], [], terminated=True)
    if cf.trusted < 2:
        raise InsufficientTrust(f"only {cf.trusted} certified quotients")
    ratios, run = [], []
    best = None
    for k in range(1, cf.trusted + 1):
        if k + 1 > cf.deg_trusted:
            break
        r = Fraction(cf.dQ(k + 1), cf.dQ(k))
        ratios.append(r)
        best = r if best is None or r > best else best
        run.append(best)
    return OmegaProfile(ratios, run)


# -- text format -------------------------------------------------------------

def format_cf(a0, quotients):
    body = ", ".join(format_poly(A) for A in quotients)
    if not a0:
        return f"[{body}]"
    return f"[{format_poly(a0)}; {body}]"


def parse_cf(spec, text):
    """Parse ``[A0; A1, ...]`` or ``[A1, ...]``; returns ``(a0, quotients)``."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError(f"continued fraction must be bracketed: {text!r}")
    s = s[1:-1]
    if ";" in s:
        head, tail = s.split(";", 1)
        a0 = parse_poly(spec, head)
    else:
        a0, tail = Poly.zero(spec), s
    tail = tail.strip()
    qs = [parse_poly(spec, t) for t in _split_top(tail, ",")] if tail else []
    for A in qs:
        if A.deg < 1:
            raise ParseError("partial quotients must have positive degree")
    return a0, qs
