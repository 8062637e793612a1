"""Unimodular 2x2 polynomial matrices acting on pairs of Laurent series.

Constructions produce explicit ``gamma = N U(a) M_k`` and re-derive their
heights and errors; the brute-force enumeration is the oracle every
construction is compared against.
"""
from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import kernels
from .algebra import NEG_INF, Poly, format_poly, poly_divmod, poly_gcd, poly_xgcd
from .contfrac import cf_expand, omega_profile
from .errors import (
    HypothesisNotMet,
    InsufficientTrust,
    KTooSmall,
    PreconditionViolated,
    RationalSlopeInput,
    SearchSpaceTooLarge,
    StrategyInapplicable,
    UndeterminedToPrecision,
)
from .laurent import Laurent, Vec2Laurent, from_rational, integral_part

ENUM_LIMIT = 1 << 22


def _sign(spec, e):
    """(-1)**e as a field code."""
    return 1 if e % 2 == 0 else spec.neg(1)


class Mat2:
    """Immutable 2x2 matrix over F_q[T]."""

    __slots__ = ("a11", "a12", "a21", "a22")

    def __init__(self, a11, a12, a21, a22):
        self.a11, self.a12, self.a21, self.a22 = a11, a12, a21, a22

    @property
    def spec(self):
        return self.a11.spec

    @property
    def entries(self):
        return (self.a11, self.a12, self.a21, self.a22)

    @property
    def hdeg(self):
        return max(e.deg for e in self.entries)

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def is_unimodular(self):
        return self.det() == Poly.one(self.spec)

    def __matmul__(self, o):
        return Mat2(self.a11 * o.a11 + self.a12 * o.a21, self.a11 * o.a12 + self.a12 * o.a22,
                    self.a21 * o.a11 + self.a22 * o.a21, self.a21 * o.a12 + self.a22 * o.a22)

    def inverse(self):
        """Inverse of a determinant-one matrix (the adjugate)."""
        if not self.is_unimodular():
            raise PreconditionViolated("matrix is not unimodular")
        return Mat2(self.a22, -self.a12, -self.a21, self.a11)

    def apply(self, v):
        return Vec2Laurent(v.c1 * self.a11 + v.c2 * self.a12, v.c1 * self.a21 + v.c2 * self.a22)

    def col_degs(self):
        return max(self.a11.deg, self.a21.deg), max(self.a12.deg, self.a22.deg)

    def key(self):
        """Deterministic order: height first, then entries lexicographically."""
        return (self.hdeg,) + tuple(e.index() for e in self.entries)

    def __eq__(self, o):
        return isinstance(o, Mat2) and self.entries == o.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        a = [format_poly(e) for e in self.entries]
        return f"[[{a[0]}, {a[1]}], [{a[2]}, {a[3]}]]"

    __repr__ = __str__

    @classmethod
    def identity(cls, spec):
        return cls(Poly.one(spec), Poly.zero(spec), Poly.zero(spec), Poly.one(spec))

    @classmethod
    def J(cls, spec):
        return cls(Poly.zero(spec), Poly.const(spec, spec.neg(1)), Poly.one(spec), Poly.zero(spec))

    @classmethod
    def U(cls, a):
        spec = a.spec
        return cls(Poly.one(spec), a, Poly.zero(spec), Poly.one(spec))


# -- normalized pairs -----------------------------------------------------

@dataclass
class NormalizedPair:
    """Start vector with ``|x| = |x2|`` plus a target: zero, rational slope or irrational slope."""

    x: Vec2Laurent
    xi: Laurent
    kind: str  # 'zero' | 'rational' | 'irrational'
    A: Poly | None = None
    B: Poly | None = None
    y2: Laurent | None = None
    y: Vec2Laurent | None = None
    yslope: Laurent | None = None
    jx: bool = False
    jy: bool = False
    _cf: dict = dc_field(default_factory=dict, repr=False)

    @property
    def spec(self):
        return self.xi.spec

    def xi_cf(self, terms=48):
        return self._cached("xi", self.xi, terms)

    def y_cf(self, terms=48):
        if self.kind != "irrational":
            raise PreconditionViolated("target slope is not irrational")
        return self._cached("y", self.yslope, terms)

    def _cached(self, name, series, terms):
        got = self._cf.get(name)
        if got is None or (got.n < terms and not got.terminated and got.trusted >= got.n):
            got = cf_expand(series, terms)
            self._cf[name] = got
        return got

    @property
    def dx2(self):
        return self.x.c2.norm_deg()

    @property
    def dy2(self):
        if self.kind == "zero":
            return NEG_INF
        return self.y2.norm_deg()

    def target(self):
        """The target as a vector (zero target included)."""
        spec = self.spec
        if self.kind == "zero":
            z = Laurent.zero(spec)
            return Vec2Laurent(z, z)
        if self.kind == "rational":
            return Vec2Laurent(self.y2 * from_rational(self.A, self.B, max(self.y2.prec, 1)), self.y2)
        return self.y

    def to_original(self, gamma):
        """Map a matrix for the normalized pair back to the input pair."""
        spec = self.spec
        J = Mat2.J(spec)
        g = gamma
        if self.jx:
            g = g @ J
        if self.jy:
            g = J.inverse() @ g
        return g


def _apply_J(v):
    return Vec2Laurent(-v.c2, v.c1)


def normalize_pair(x, y=None, rational=None):
    """Normalize start vector and target.

    ``y`` is a target vector (or None for the zero target); ``rational`` is
    an exact ``(A, B, y2)`` triple describing the target ``y2 * (A/B, 1)``.
    """
    spec = x.spec
    jx = False
    if x.c1.is_rational() and x.c2.is_rational():
        raise RationalSlopeInput("start vector has a rational slope (discrete orbit)")
    d1, d2 = x.c1.norm_deg(), x.c2.norm_deg()
    if d2 == NEG_INF and d1 == NEG_INF:
        raise PreconditionViolated("start vector is zero")
    if d1 > d2:
        x = _apply_J(x)
        jx = True
    xi = x.c1 * x.c2.inverse()
    if rational is not None:
        A, B, y2 = rational
        if not B and not A:
            raise PreconditionViolated("rational slope with A = B = 0")
        jy = False
        if A.deg > B.deg:
            # J (y2 A/B, y2) = (-y2, y2 A/B): slope -B/A, new y2 = y2 A/B
            y2 = y2 * from_rational(A, B, max(y2.prec, 1))
            A, B = -B, A
            jy = True
        g = poly_gcd(A, B)
        if g.deg > 0:
            A, B = poly_divmod(A, g)[0], poly_divmod(B, g)[0]
        c = spec.inv(B.lc)
        A, B = A.scale(c), B.scale(c)
        return NormalizedPair(x, xi, "rational", A=A, B=B, y2=y2, jx=jx, jy=jy)
    if y is None:
        return NormalizedPair(x, xi, "zero", jx=jx)
    jy = False
    e1, e2 = y.c1.deg_upper(), y.c2.norm_deg()
    if e2 == NEG_INF and e1 == NEG_INF:
        return NormalizedPair(x, xi, "zero", jx=jx)
    if e1 > e2:
        y = _apply_J(y)
        jy = True
    slope = y.c1 * y.c2.inverse()
    return NormalizedPair(x, xi, "irrational", y2=y.c2, y=y, yslope=slope, jx=jx, jy=jy)


# -- matrices built from continued fractions ------------------------------

def convergent_matrix(cf, k):
    """``M_k = [[Q_k, -P_k], [(-1)^(k-1) Q_{k-1}, (-1)^k P_{k-1}]]``."""
    if k > cf.trusted and not (cf.terminated and k <= cf.n):
        raise InsufficientTrust(f"k={k} beyond the {cf.trusted} certified quotients")
    spec = cf.spec
    return Mat2(cf.Q(k), -cf.P(k),
                cf.Q(k - 1).scale(_sign(spec, k - 1)), cf.P(k - 1).scale(_sign(spec, k)))


def slope_matrix(target, j=None):
    """Unimodular N whose first column carries the target slope.

    ``target`` is ``(A, B)`` (rational, gcd a unit) or the continued
    fraction of an irrational slope, in which case
    ``N_j = [[R_j, (-1)^(j-1) R_{j-1}], [S_j, (-1)^(j-1) S_{j-1}]]``.
    """
    if isinstance(target, tuple):
        A, B = target
        spec = A.spec
        cf = cf_expand(from_rational(A, B, 2), 1 << 16)
        n = cf.n
        c = spec.mul(B.lc, spec.inv(cf.Q(n).lc))  # A = c P_n, B = c Q_n
        s = spec.mul(_sign(spec, n + 1), spec.inv(c))
        return Mat2(A, cf.P(n - 1).scale(s), B, cf.Q(n - 1).scale(s))
    cf = target
    if j is None or j < 1:
        raise PreconditionViolated("index j >= 1 required")
    if j + 1 > cf.trusted:
        raise InsufficientTrust(f"j+1={j + 1} beyond the {cf.trusted} certified quotients")
    spec = cf.spec
    sg = _sign(spec, j - 1)
    return Mat2(cf.P(j), cf.P(j - 1).scale(sg), cf.Q(j), cf.Q(j - 1).scale(sg))


def _eps(cf, xi, k):
    return xi * cf.Q(k) - cf.P(k)


def choose_a(np_, N, k, variant="floor"):
    """The unipotent parameter a for ``gamma = N U(a) M_k``; returns ``(a, rho)``."""
    spec = np_.spec
    s, s2 = N.a21, N.a22
    if not s:
        raise PreconditionViolated("lower-left entry of N must be nonzero")
    cf = np_.xi_cf(k + 2)
    if k > cf.trusted:
        raise InsufficientTrust(f"k={k} beyond the {cf.trusted} certified quotients")
    xi, x2, y2 = np_.xi, np_.x.c2, np_.y2
    e_prev = _eps(cf, xi, k - 1)
    e_k = _eps(cf, xi, k)
    sg = _sign(spec, k - 1)
    term1 = (y2 * Laurent.from_poly(Poly.const(spec, sg), max(y2.prec, 1))) \
        * (x2 * e_prev * s).inverse()
    term2 = (e_k * e_prev.inverse()) * Poly.const(spec, sg)
    term3 = from_rational(s2, s, max(term1.prec, 1))
    rho = term1 - term2 - term3
    try:
        base = integral_part(rho)
    except UndeterminedToPrecision as exc:
        raise InsufficientTrust("rho not known to integral precision") from exc
    if variant == "floor":
        return base, rho
    if variant == "floor_plus_one":
        return base + 1, rho
    if variant != "auto":
        raise ValueError(f"unknown variant {variant!r}")
    Qk, Qk1 = cf.Q(k), cf.Q(k - 1)
    lower_left = s * Qk + Qk1.scale(sg) * (s * base + s2)
    if lower_left.deg < (s * Qk1).deg:
        return base + 1, rho
    return base, rho


@dataclass
class OrbitCandidate:
    gamma: Mat2
    errdeg: float
    k: int | None = None
    j: int | None = None
    a: Poly | None = None
    source: str = "construct"
    checks: dict = dc_field(default_factory=dict)
    strategy: str = ""

    @property
    def hdeg(self):
        return self.gamma.hdeg

    @property
    def ok(self):
        return all(v is not False for v in self.checks.values())


def orbit_error(np_, gamma):
    """``log_q |gamma x - y|``; falls back to the certified upper bound."""
    v = gamma.apply(np_.x) - np_.target()
    try:
        return v.norm_deg()
    except UndeterminedToPrecision:
        return v.deg_upper()


def gamma_rational(np_, k):
    """``gamma = N U(a) M_k`` for a rational target, with both height and error bounds checked."""
    if np_.kind != "rational":
        raise PreconditionViolated("target slope is not rational")
    cf = np_.xi_cf(k + 2)
    N = slope_matrix((np_.A, np_.B))
    a, _ = choose_a(np_, N, k, "floor")
    D = np_.dy2 - np_.dx2
    if a.deg < 1:
        raise KTooSmall(f"|a| <= 1 at k={k}; bounds not guaranteed")
    if D + cf.dQ(k - 1) <= np_.B.deg:
        # the a Q_{k-1} term of the first column does not dominate yet
        raise KTooSmall(f"|y2 Q_(k-1) / x2| <= |B| at k={k}; height equality not guaranteed")
    M = convergent_matrix(cf, k)
    gamma = N @ Mat2.U(a) @ M
    err = orbit_error(np_, gamma)
    checks = {
        "unimodular": gamma.is_unimodular(),
        "height_equals": gamma.hdeg == D + cf.dQ(k) + cf.dQ(k - 1),
        "error_bound": err <= np_.B.deg + np_.dx2 - cf.dQ(k),
    }
    return OrbitCandidate(gamma, err, k=k, a=a, checks=checks)


def _irr_bounds(np_, cf, ycf, j, k, gamma, err):
    dSj, dSj1, dSjm = ycf.dQ(j), ycf.dQ(j + 1), ycf.dQ(j - 1)
    dQk, dQk1 = cf.dQ(k), cf.dQ(k - 1)
    D = np_.dy2 - np_.dx2
    checks = {
        "unimodular": gamma.is_unimodular(),
        "height_upper": gamma.hdeg <= max(dSj + dQk, D + dQk + dQk1),
        "error_upper": err <= max(np_.dy2 - dSj - dSj1, np_.dx2 + dSj - dQk),
    }
    # real-valued lower bound; reported, never asserted
    q = np_.spec.q
    lhs = abs(Fraction(q) ** (D + dQk + dQk1) - Fraction(q) ** (dSj + dQk)) \
        - Fraction(q) ** (dSjm + dQk1)
    checks["height_lower"] = True if lhs <= Fraction(q) ** gamma.hdeg else None
    return checks


def gamma_irrational(np_, strategy, j=None, k=None, omega_y=None, max_index=40):
    """``gamma = N_j U(a) M_k`` for an irrational target slope.

    Strategies pick (j, k) as follows: ``sw`` takes j and finds k with
    ``3 deg S_j`` bracketed by ``D + deg Q_{k-1}`` and ``D + deg Q_k``;
    ``sw2`` takes k with ``2 deg Q_{k-1} <= deg Q_k`` and finds j with
    ``2 deg S_j <= D + deg Q_k < 2 deg S_{j+1}``; ``jk_tau`` takes k and
    finds j with ``deg S_j <= tau deg Q_k < deg S_{j+1}``.
    """
    if np_.kind != "irrational":
        raise PreconditionViolated("target slope is not irrational")
    cf = np_.xi_cf(max_index + 2)
    ycf = np_.y_cf(max_index + 2)
    D = np_.dy2 - np_.dx2
    variant = "floor"
    extra = {}
    if strategy == "sw":
        est = omega_profile(cf).estimate()
        if est is not None and est >= 3:
            raise StrategyInapplicable("prefix evidence suggests omega(xi) >= 3")
        js = [j] if j is not None else range(1, ycf.trusted)
        found = None
        for jj in js:
            if jj < 1 or jj + 1 > ycf.trusted:
                continue
            target = 3 * ycf.dQ(jj) - D
            for kk in range(1, cf.trusted + 1):
                if cf.dQ(kk - 1) < target <= cf.dQ(kk):
                    if D + cf.dQ(kk) < 3 * ycf.dQ(jj + 1):
                        found = (jj, kk)
                    break
            if found:
                break
        if not found:
            raise StrategyInapplicable("no (j, k) satisfies the cube-root bracket")
        j, k = found
    elif strategy == "sw2":
        variant = "auto"
        ks = [k] if k is not None else range(2, cf.trusted + 1)
        found = None
        for kk in ks:
            if kk < 1 or kk > cf.trusted or 2 * cf.dQ(kk - 1) > cf.dQ(kk):
                continue
            for jj in range(1, ycf.trusted):
                if 2 * ycf.dQ(jj) <= D + cf.dQ(kk) < 2 * ycf.dQ(jj + 1):
                    found = (jj, kk)
                    break
            if found:
                break
        if not found:
            raise StrategyInapplicable("no (j, k) with deg Q_{k-1} <= deg Q_k / 2")
        j, k = found
    elif strategy == "jk_tau":
        if omega_y is None:
            prof = omega_profile(ycf)
            omega_y = prof.estimate() or Fraction(1)
        omega_y = Fraction(omega_y)
        tau = omega_y / (2 * omega_y + 1)
        if k is None:
            raise PreconditionViolated("jk_tau needs k")
        t = tau * cf.dQ(k)
        found = None
        for jj in range(1, ycf.trusted):
            if ycf.dQ(jj) <= t < ycf.dQ(jj + 1):
                found = jj
                break
        if found is None:
            raise StrategyInapplicable("no j brackets tau * deg Q_k")
        j = found
        extra["tau"] = tau
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    N = slope_matrix(ycf, j)
    a, _ = choose_a(np_, N, k, variant)
    M = convergent_matrix(cf, k)
    gamma = N @ Mat2.U(a) @ M
    err = orbit_error(np_, gamma)
    checks = _irr_bounds(np_, cf, ycf, j, k, gamma, err)
    dQk, dQk1 = cf.dQ(k), cf.dQ(k - 1)
    if strategy == "sw":
        checks["cube_root_error"] = 3 * err <= np_.dy2 + 2 * np_.dx2 - dQk - dQk1
    elif strategy == "sw2":
        checks["half_error"] = 2 * err <= np_.dx2 + np_.dy2 - dQk
        checks["half_height"] = 2 * gamma.hdeg <= D + 3 * dQk
        checks["lower_left_floor"] = gamma.a21.deg >= (ycf.Q(j) * cf.Q(k - 1)).deg
    else:
        checks["bracket"] = ycf.dQ(j) <= extra["tau"] * dQk < ycf.dQ(j + 1)
    return OrbitCandidate(gamma, err, k=k, j=j, a=a, checks=checks)


def gamma_decompose(gamma, np_, j, k):
    """``G = N^-1 gamma M_k^-1`` and its two column degrees."""
    cf = np_.xi_cf(k + 2)
    if np_.kind == "rational":
        N = slope_matrix((np_.A, np_.B))
    elif np_.kind == "irrational":
        N = slope_matrix(np_.y_cf(j + 2), j)
    else:
        N = Mat2.identity(np_.spec)
    M = convergent_matrix(cf, k)
    G = N.inverse() @ gamma @ M.inverse()
    c1, c2 = G.col_degs()
    return G, c1, c2


# -- brute force -------------------------------------------------------------

def _window(series, top):
    """Coefficients of each series from exponent ``top`` down to the common floor."""
    bottom = max(s.low for s in series)
    out = []
    for s in series:
        out.append([s.coeff(e) if e >= s.low else 0 for e in range(top, bottom - 1, -1)])
    return out, bottom


def _row_errors(x1, x2, target, H, spec, depth):
    """``deg(c x1 + d x2 - target)`` for all c, d of degree <= H.

    Entry ``ic + q^(H+1) * id``.  Values equal to the returned floor mean "at most".
    Exact inputs are expanded to precision ``depth`` first.
    """
    x1, x2, target = (s.at_prec(depth) if s.exact and s.prec < depth else s
                      for s in (x1, x2, target))
    basis = [x1.shift(i) for i in range(H + 1)] + [x2.shift(i) for i in range(H + 1)]
    top = max([b.lead_eff() for b in basis] + [target.lead_eff(), 0])
    vecs, bottom = _window(basis + [target], top)
    V, t = vecs[:-1], vecs[-1]
    pos = _lead_positions(spec, V, t)
    floor = bottom - 1
    return np.where(pos < 0, floor, top - pos), floor


def _lead_positions(spec, V, t):
    if spec.m == 1:
        return np.asarray(kernels.lead_positions(V, t, spec.p), dtype=np.int64)
    from .scan import _lead_positions_generic
    return _lead_positions_generic(spec, V, t)


class _PolyTables:
    """Vectorized polynomial index arithmetic over F_q (digits base q)."""

    def __init__(self, spec, n):
        q = spec.q
        self.spec = spec
        self.q = q
        self.n = n
        self.add = np.array([[spec.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
        self.mul = np.array([[spec.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
        self.pow = q ** np.arange(n, dtype=np.int64)

    def digits(self, idx_array, n):
        out = np.empty((len(idx_array), n), dtype=np.int64)
        r = np.array(idx_array, dtype=np.int64)
        for i in range(n):
            out[:, i] = r % self.q
            r //= self.q
        return out

    def affine(self, base, tdig, c):
        """Indices of ``base + t*c`` for every row of t-digits (all results of degree < n)."""
        n = self.n
        acc = np.tile(np.array(list(base.c) + [0] * (n - len(base.c)), dtype=np.int64),
                      (tdig.shape[0], 1))
        for j, cj in enumerate(c.c):
            if cj == 0:
                continue
            prod = self.mul[tdig, cj]
            for i in range(tdig.shape[1]):
                if i + j < n:
                    acc[:, i + j] = self.add[acc[:, i + j], prod[:, i]]
        return acc @ self.pow


@dataclass
class BruteOrbitResult:
    H: int
    shells: dict  # h -> (best errdeg, [Mat2 ...] minimal candidates)
    floor: int
    count: int
    err_top: np.ndarray = dc_field(repr=False, default=None)
    err_bot: np.ndarray = dc_field(repr=False, default=None)

    def best(self, h):
        return self.shells[h][0]

    def best_upto(self, h):
        vals = [self.shells[s][0] for s in self.shells if s <= h]
        return min(vals) if vals else None

    def lookup(self, gamma):
        """Error of ``gamma`` as recorded by the enumeration (None if out of range)."""
        if gamma.hdeg > self.H or not gamma.is_unimodular():
            return None
        n = self.H + 1
        q = gamma.spec.q
        i_top = gamma.a11.index() + q ** n * gamma.a12.index()
        i_bot = gamma.a21.index() + q ** n * gamma.a22.index()
        return int(max(self.err_top[i_top], self.err_bot[i_bot]))


@functools.lru_cache(maxsize=8)
def _sl2_layout(spec, Hdeg):
    """Flat index arrays for every SL2 matrix with entries of degree <= Hdeg.

    Bottom rows (c, d) run over coprime pairs; the top rows form the coset
    ``(a0, b0) + t (c, d)`` of a reduced Bezout solution, and the height is
    ``max(deg c, deg d) + max(deg t, 0)``.  Returns ``(top, bottom, height)``
    where rows are encoded as ``index(first) + q^(H+1) index(second)``.
    """
    q = spec.q
    n = Hdeg + 1
    qn = q ** n
    tables = _PolyTables(spec, n)
    all_t = tables.digits(np.arange(qn), n)
    t_deg = np.zeros(qn, dtype=np.int64)
    for i in range(1, qn):
        t_deg[i] = Poly.from_index(spec, i).deg
    tops, bots, hds = [], [], []
    for ic in range(qn):
        c = Poly.from_index(spec, ic)
        for id_ in range(qn):
            if ic == 0 and id_ == 0:
                continue
            d = Poly.from_index(spec, id_)
            g, u, v = poly_xgcd(c, d)
            if g.deg != 0:
                continue
            # u c + v d = 1, so a d - b c = 1 for a = v, b = -u
            a0, b0 = v, -u
            m = max(c.deg, d.deg)
            if c.deg >= d.deg:
                t0, a0 = poly_divmod(a0, c)
                b0 = b0 - t0 * d
            else:
                t0, b0 = poly_divmod(b0, d)
                a0 = a0 - t0 * c
            span = Hdeg - m
            if span < 0:
                continue
            nt = q ** (span + 1)
            tdig = all_t[:nt, :span + 1]
            tops.append(tables.affine(a0, tdig, c) + qn * tables.affine(b0, tdig, d))
            bots.append(np.full(nt, ic + qn * id_, dtype=np.int64))
            hds.append(m + np.maximum(t_deg[:nt], 0))
    return np.concatenate(tops), np.concatenate(bots), np.concatenate(hds)


def _row_mat(spec, qn, top, bot):
    return Mat2(Poly.from_index(spec, int(top % qn)), Poly.from_index(spec, int(top // qn)),
                Poly.from_index(spec, int(bot % qn)), Poly.from_index(spec, int(bot // qn)))


def brute_orbit(np_, Hdeg, limit=ENUM_LIMIT, keep=16, depth=None):
    """Exhaustive search over SL2 matrices with all entries of degree <= Hdeg.

    Errors of every possible row are tabulated once per target component;
    a matrix's error is the larger of its two row errors.  Per height shell
    the minimal error and up to ``keep`` minimizers (in :meth:`Mat2.key`
    order) are reported.
    """
    spec = np_.spec
    q = spec.q
    n = Hdeg + 1
    qn = q ** n
    if q ** (3 * n) > 4 * limit:
        raise SearchSpaceTooLarge(f"about q^{3 * n} matrices exceed the limit")
    if depth is None:
        depth = 48 + 4 * n
    x1, x2 = np_.x.c1, np_.x.c2
    y = np_.target()
    err_top, f1 = _row_errors(x1, x2, y.c1, Hdeg, spec, depth)
    err_bot, f2 = _row_errors(x1, x2, y.c2, Hdeg, spec, depth)
    floor = max(f1, f2)
    top, bot, hd = _sl2_layout(spec, Hdeg)
    err = np.maximum(err_top[top], err_bot[bot])
    shells = {}
    for h in range(Hdeg + 1):
        sel = np.nonzero(hd == h)[0]
        if not len(sel):
            continue
        best = int(err[sel].min())
        idx = sel[err[sel] == best]
        order = np.lexsort((bot[idx] // qn, bot[idx] % qn, top[idx] // qn, top[idx] % qn))
        shells[h] = (best, [_row_mat(spec, qn, top[i], bot[i]) for i in idx[order[:keep]]])
    return BruteOrbitResult(Hdeg, shells, floor, len(top), err_top, err_bot)


def enumerate_sl2_naive(spec, Hdeg):
    """All determinant-one matrices with entries of degree <= Hdeg (tiny sizes only)."""
    polys = [Poly.from_index(spec, i) for i in range(spec.q ** (Hdeg + 1))]
    one = Poly.one(spec)
    out = []
    for a in polys:
        for b in polys:
            for c in polys:
                for d in polys:
                    if a * d - b * c == one:
                        out.append(Mat2(a, b, c, d))
    return out


# -- verification scans ----------------------------------------------------------

@dataclass
class VerificationReport:
    passed: bool
    threshold: int
    min_err: int
    H: int
    witnesses: list
    floor: int
    notes: dict = dc_field(default_factory=dict)


def _min_over_heights(np_, H, limit):
    res = brute_orbit(np_, H, limit=limit)
    best = None
    wit = []
    for h, (e, mats) in res.shells.items():
        if best is None or e < best:
            best, wit = e, list(mats)
        elif e == best:
            wit.extend(mats)
    return best, wit, res


def lb_check(np_, k, limit=ENUM_LIMIT):
    """All gamma with ``|gamma| < |Q_{k+1}|`` satisfy ``|gamma x| >= |x2| / |Q_k|``."""
    if np_.kind != "zero":
        raise PreconditionViolated("the lower bound concerns the zero target")
    cf = np_.xi_cf(k + 2)
    if k + 1 > cf.deg_trusted and not cf.terminated:
        raise InsufficientTrust("deg Q_{k+1} not certified")
    H = cf.dQ(k + 1) - 1
    threshold = np_.dx2 - cf.dQ(k)
    best, wit, res = _min_over_heights(np_, H, limit)
    Mk = convergent_matrix(cf, k)
    mk_err = res.lookup(Mk)
    passed = best >= threshold and best > res.floor
    rep = VerificationReport(passed, threshold, best, H, wit, res.floor)
    rep.notes["Mk_error"] = mk_err
    rep.notes["Mk_attains"] = mk_err == threshold
    return rep


def gap_check(np_, k, limit=ENUM_LIMIT):
    """For a rational target: every gamma below the height bound has error >= |x2/(B Q_k)|."""
    if np_.kind != "rational":
        raise PreconditionViolated("gap check needs a rational target")
    cf = np_.xi_cf(k + 2)
    dB, dx2, dy2 = np_.B.deg, np_.dx2, np_.dy2
    if not cf.dQ(k) > dB + dx2 - dy2:
        raise HypothesisNotMet(f"deg Q_k = {cf.dQ(k)} must exceed {dB + dx2 - dy2}")
    if k + 1 > cf.deg_trusted and not cf.terminated:
        raise InsufficientTrust("deg Q_{k+1} not certified")
    H = dy2 + cf.dQ(k) + cf.dQ(k + 1) - dx2 - 1
    threshold = dx2 - dB - cf.dQ(k)
    best, wit, res = _min_over_heights(np_, H, limit)
    passed = best >= threshold and best > res.floor
    return VerificationReport(passed, threshold, best, H, wit, res.floor)


# -- counting ---------------------------------------------------------------

def sl2_count(spec, B1deg, B2deg, limit=ENUM_LIMIT):
    """Number of SL2 matrices with column degrees <= (B1deg, B2deg), and ratio to q^(B1+B2)."""
    q = spec.q
    n1 = B1deg + 1
    if q ** (2 * n1) > limit:
        raise SearchSpaceTooLarge("first-column enumeration exceeds the limit")
    total = 0
    for i in range(q ** n1):
        f = Poly.from_index(spec, i)
        for j in range(q ** n1):
            g = Poly.from_index(spec, j)
            if not f and not g:
                continue
            G, s, r = poly_xgcd(f, g)
            if G.deg != 0:
                continue
            # f v - u g = 1 with v = s, u = -r
            v, u = s, -r
            m = max(f.deg, g.deg)
            if m >= 1:
                if f.deg >= g.deg:
                    t, u = poly_divmod(u, f)
                    v = v - t * g
                else:
                    t, v = poly_divmod(v, g)
                    u = u - t * f
                pdeg = max(u.deg, v.deg)
                total += (1 if pdeg <= B2deg else 0)
                if B2deg >= m:
                    total += q ** (B2deg - m + 1) - 1
            else:
                total += q ** (B2deg + 1)
    return total, Fraction(total, q ** (B1deg + B2deg))


def sl2_count_naive(spec, B1deg, B2deg):
    polys1 = [Poly.from_index(spec, i) for i in range(spec.q ** (B1deg + 1))]
    polys2 = [Poly.from_index(spec, i) for i in range(spec.q ** (B2deg + 1))]
    one = Poly.one(spec)
    return sum(1 for a in polys1 for c in polys1 for b in polys2 for d in polys2
               if a * d - b * c == one)


def phi_poly(f, limit=ENUM_LIMIT):
    """Order of the unit group of F_q[T]/(f), by enumeration of residues."""
    if not f:
        raise PreconditionViolated("f must be nonzero")
    spec = f.spec
    if spec.q ** f.deg > limit:
        raise SearchSpaceTooLarge("residue enumeration exceeds the limit")
    return sum(1 for i in range(spec.q ** f.deg)
               if poly_gcd(Poly.from_index(spec, i), f).deg == 0)


@dataclass(frozen=True)
class PhiSum:
    i: int
    monic_only: bool
    enumerated: int
    published: int  # q^(2i) (q - 1)

    @property
    def matches_published(self):
        return self.enumerated == self.published


def phi_degree_sum(spec, i, monic_only=True, limit=ENUM_LIMIT):
    """Sum of phi(f) over deg f = i, next to the closed form q^(2i)(q-1) it is often quoted with."""
    q = spec.q
    if q ** (2 * i + 1) > limit:
        raise SearchSpaceTooLarge("degree sum enumeration exceeds the limit")
    leads = [1] if monic_only else list(range(1, q))
    total = 0
    for lc in leads:
        for low in range(q ** i):
            c = list(Poly.from_index(spec, low).c)
            c += [0] * (i - len(c)) + [lc]
            total += phi_poly(Poly(spec, c), limit)
    return PhiSum(i, monic_only, total, q ** (2 * i) * (q - 1))


# -- CSV -----------------------------------------------------------------

ORBIT_COLUMNS = ["hdeg", "errdeg", "k", "j", "a", "a11", "a12", "a21", "a22", "source"]


def _deg_text(d):
    return "-inf" if d == NEG_INF else str(int(d))


def orbit_rows(cands):
    for c in cands:
        g = c.gamma
        yield [str(g.hdeg), _deg_text(c.errdeg), "" if c.k is None else str(c.k),
               "" if c.j is None else str(c.j), "" if c.a is None else format_poly(c.a)] \
            + [format_poly(e) for e in g.entries] + [c.source]


def orbit_csv(cands):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ORBIT_COLUMNS)
    w.writerows(orbit_rows(cands))
    return buf.getvalue()
