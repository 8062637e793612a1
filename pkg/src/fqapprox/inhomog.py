"""Homogeneous and inhomogeneous approximation constructions.

Everything here produces explicit polynomials and then re-verifies the
promised inequality by exact degree arithmetic on the result.
"""
from __future__ import annotations

import csv
import itertools
import math
import random
import warnings
from dataclasses import dataclass

import numpy as np

from . import scan
from .algebra import NEG_INF, Poly, poly_divmod, poly_gcd, poly_xgcd
from .contfrac import cf_eval, cf_expand
from .errors import (
    InsufficientTrust,
    PreconditionViolated,
    RationalSlopeFallback,
    SearchSpaceTooLarge,
    TableExhausted,
    UndeterminedToPrecision,
)
from .laurent import Laurent, from_rational, integral_part
from .linalg import IncrementalSystem

SEARCH_LIMIT = 1 << 22


@dataclass(frozen=True)
class ApproxSolution:
    Q: Poly
    P: Poly
    errdeg: float

    def recompute(self, xi, alpha=None):
        """Degree of ``Q xi - alpha - P`` from scratch."""
        err = xi * self.Q - self.P
        if alpha is not None:
            err = err - alpha
        return err.norm_deg()


@dataclass(frozen=True)
class LinearFormPair:
    lam1: Laurent
    kap1: Laurent
    lam2: Laurent
    kap2: Laurent
    ddeg: int

    @classmethod
    def build(cls, lam1, kap1, lam2, kap2):
        det = lam1 * kap2 - lam2 * kap1
        try:
            d = det.norm_deg()
        except UndeterminedToPrecision as exc:
            raise PreconditionViolated("independence not certified at this precision") from exc
        if d == NEG_INF:
            raise PreconditionViolated("linear forms are dependent")
        return cls(lam1, kap1, lam2, kap2, d)

    def det(self):
        return self.lam1 * self.kap2 - self.lam2 * self.kap1

    def L1(self, P1, P2):
        return self.lam1 * P1 + self.kap1 * P2

    def L2(self, P1, P2):
        return self.lam2 * P1 + self.kap2 * P2

    def swapped(self):
        return LinearFormPair(self.lam2, self.kap2, self.lam1, self.kap1, self.ddeg)


def _deg(x):
    """Degree with a safe fallback to the a-priori upper bound."""
    try:
        return x.norm_deg()
    except UndeterminedToPrecision:
        return x.deg_upper()


# -- Dirichlet -------------------------------------------------------------

def dirichlet_solutions(xi, count):
    """Convergent pairs ``(Q_n, P_n)``, n = 1..count, with their error degrees."""
    cf = cf_expand(xi, count + 1)
    if cf.terminated:
        count = min(count, cf.n)
    elif cf.trusted < count or cf.deg_trusted < count + 1:
        raise InsufficientTrust(
            f"{cf.trusted} certified quotients, {count} solutions requested")
    out = []
    for n in range(1, count + 1):
        Q, P = cf.Q(n), cf.P(n)
        out.append(ApproxSolution(Q, P, (xi * Q - P).norm_deg()))
    return out


# -- Cassels reduction -------------------------------------------------------

def cassels_reduce(theta, phi, psi, chi, ddeg):
    """Polynomial P with ``|theta+P psi||phi+P chi| <= q^(ddeg-1)`` and ``|theta+P psi| <= |psi|``."""
    try:
        dpsi = psi.norm_deg()
    except UndeterminedToPrecision as exc:
        raise PreconditionViolated("psi is zero to precision") from exc
    if dpsi == NEG_INF:
        raise PreconditionViolated("psi must be nonzero")
    cond = max((theta * chi - phi * psi).deg_upper(), (psi * chi).deg_upper())
    if cond > ddeg:
        raise PreconditionViolated(
            f"hypothesis degree {cond} exceeds {ddeg} (or is not certified)")
    ratio = theta * psi.inverse()
    try:
        ip = integral_part(ratio)
    except UndeterminedToPrecision as exc:
        raise PreconditionViolated("theta/psi not known to integral precision") from exc
    P0 = -ip
    for P in (P0, P0 + 1):
        a = (theta + psi * P).deg_upper()
        b = (phi + chi * P).deg_upper()
        if a + b <= ddeg - 1 and a <= dpsi:
            return P
    raise PreconditionViolated("no candidate certified at the available precision")


# -- two linear forms ----------------------------------------------------------

def _normalize_pair(P1, P2):
    lead = P2 if P2 else P1
    k = lead.spec.inv(lead.lc)
    return P1.scale(k), P2.scale(k)


def linear_forms_2(L, r1, r2):
    """Nonzero ``(P1, P2)`` with ``deg L1 < -r1`` and ``deg L2 < -r2``."""
    if not L.ddeg < -(r1 + r2):
        raise PreconditionViolated(f"need ddeg < {-(r1 + r2)}, got {L.ddeg}")
    try:
        eta = L.kap1 * L.lam1.inverse()
        dlam = L.lam1.norm_deg()
    except UndeterminedToPrecision:
        eta = None
    if eta is not None:
        got = _via_cf(L, eta, dlam, r1, r2)
        if got is not None:
            return _normalize_pair(*got)
    return _normalize_pair(*_via_linear_algebra(L, r1, r2))


def _via_cf(L, eta, dlam, r1, r2):
    terms = 8
    while True:
        try:
            cf = cf_expand(eta, terms)
        except UndeterminedToPrecision:
            return None
        for n in range(-1, cf.n + 1):
            if n > cf.trusted:
                break
            last = n == cf.n
            if last and not cf.terminated:
                break
            d_next = math.inf if last else cf.dQ(n + 1)
            if not (n + 1 <= cf.deg_trusted or last or cf.terminated):
                break
            if dlam - d_next < -r1:
                P1, P2 = -cf.P(n), cf.Q(n)
                if _deg(L.L1(P1, P2)) < -r1 and _deg(L.L2(P1, P2)) < -r2:
                    return P1, P2
                return None
        if cf.terminated or cf.n < terms or terms > 4096:
            return None
        terms *= 2


def _via_linear_algebra(L, r1, r2):
    spec = L.lam1.spec
    ent = [L.lam1, L.kap1, L.lam2, L.kap2]
    top = max(_deg(e) for e in ent)
    B = max(0, top + max(-r1, -r2) - 1 - L.ddeg)
    n = B + 1
    if spec.q ** (2 * n) > SEARCH_LIMIT ** 2:
        raise SearchSpaceTooLarge("degree bound too large for the fallback search")
    system = IncrementalSystem(spec, 2 * n)
    for (lam, kap), r in (((L.lam1, L.kap1), r1), ((L.lam2, L.kap2), r2)):
        # coefficient of T^e in lam*P1 + kap*P2 must vanish for e >= -r
        for e in range(-r, max(_deg(lam), _deg(kap)) + B + 1):
            try:
                row = [lam.coeff(e - i) for i in range(n)] + [kap.coeff(e - i) for i in range(n)]
            except UndeterminedToPrecision as exc:
                raise InsufficientTrust("forms not known to the needed precision") from exc
            system.add_row(row, 0)
    sol = system.solution(nonzero=True)
    if sol is None:
        raise InsufficientTrust("no nonzero point found within the degree bound")
    return Poly(spec, sol[:n]), Poly(spec, sol[n:])


# -- Minkowski inhomogeneous -------------------------------------------------

def minkowski_inhom(L, rho1, rho2, k):
    """``(Q1, Q2)`` with the product bound ``q^(ddeg-2)`` and ``deg(L1(Q)+rho1) < -k``."""
    eta_rational = False
    try:
        eta = L.kap1 * L.lam1.inverse()
        eta_rational = eta.is_rational() or (L.lam1.is_rational() and L.kap1.is_rational())
    except UndeterminedToPrecision:
        eta_rational = False
    if eta_rational:
        warnings.warn("slope of the first form is rational; exchanging the forms",
                      RationalSlopeFallback, stacklevel=2)
        Q1, Q2 = _minkowski_core(L.swapped(), rho2, rho1, k)
        return Q1, Q2
    return _minkowski_core(L, rho1, rho2, k)


def _minkowski_core(L, rho1, rho2, k):
    P1, P2 = linear_forms_2(L, k, -k - L.ddeg - 1)
    g = poly_gcd(P1, P2)
    if g.deg > 0:
        P1, P2 = poly_divmod(P1, g)[0], poly_divmod(P2, g)[0]
    _, u, v = poly_xgcd(P1, P2)
    R1, R2 = -v, u
    lam1p = L.L1(P1, P2)
    kap1p = L.L1(R1, R2)
    lam2p = L.L2(P1, P2)
    kap2p = L.L2(R1, R2)
    det = L.det()
    num = rho1 * lam2p - rho2 * lam1p
    try:
        Q2p = integral_part(num * det.inverse())
    except UndeterminedToPrecision as exc:
        raise InsufficientTrust("transformed system not known to integral precision") from exc
    theta = kap1p * Q2p + rho1
    phi = kap2p * Q2p + rho2
    try:
        Q1p = cassels_reduce(theta, phi, lam1p, lam2p, L.ddeg - 1)
    except PreconditionViolated as exc:
        raise InsufficientTrust(f"reduction step not certified: {exc}") from exc
    Q1 = P1 * Q1p + R1 * Q2p
    Q2 = P2 * Q1p + R2 * Q2p
    return Q1, Q2


def minkowski_check(L, rho1, rho2, k, Q1, Q2):
    """``(product_ok, irr_ok)`` recomputed with certified degree upper bounds."""
    a = (L.L1(Q1, Q2) + rho1).deg_upper()
    b = (L.L2(Q1, Q2) + rho2).deg_upper()
    return a + b <= L.ddeg - 2, a < -k


# -- inhomogeneous solutions --------------------------------------------------

def inhom_solutions(xi, alpha, count, max_k=None):
    """``count`` distinct Q with ``deg <Q xi - alpha> <= -2 - deg Q``."""
    if xi.is_rational():
        raise PreconditionViolated("xi is rational; an irrational slope is required")
    spec = xi.spec
    one = Laurent.from_poly(Poly.one(spec), max(xi.prec, 1))
    zero = Laurent.zero(spec)
    L = LinearFormPair(xi, one, one, zero, 0)
    found = {}
    k = 0
    limit = max_k if max_k is not None else (xi.prec if not xi.exact else 1 << 12)
    while len(found) < count:
        if k > limit:
            raise InsufficientTrust(f"only {len(found)} solutions certified")
        try:
            Q1, Q2 = _minkowski_core(L, -alpha, zero, k)
        except (InsufficientTrust, UndeterminedToPrecision) as exc:
            raise InsufficientTrust(f"only {len(found)} solutions certified: {exc}") from exc
        k += 1
        if not Q1 or Q1 in found:
            continue
        err = xi * Q1 - alpha + Q2
        d = err.deg_upper()
        if d <= -2 - Q1.deg:
            found[Q1] = ApproxSolution(Q1, -Q2, d)
    return list(found.values())


# -- sharpness ---------------------------------------------------------------

def _t_divisible_stream(spec, degrees, rng):
    T = Poly.T(spec)
    for d in itertools.cycle(degrees):
        c = [rng.randrange(spec.q) for _ in range(d - 1)] + [rng.randrange(1, spec.q)]
        yield T * Poly(spec, c)


def sharp_instance(spec, quotient_degrees, seed, prec=48):
    """``(xi, alpha)`` with T | A_i for all i and ``alpha = T^-1 (1 - xi)``.

    The degree list is cycled indefinitely; both series are exact.
    """
    degrees = list(quotient_degrees)
    if not degrees or min(degrees) < 1:
        raise PreconditionViolated("quotient degrees must be positive")
    rng = random.Random(seed)
    xi = cf_eval(Poly.zero(spec), _t_divisible_stream(spec, degrees, rng), prec)
    one = Laurent.from_poly(Poly.one(spec), prec)
    alpha = (one - xi).shift(-1)
    return xi, alpha


def sharpness_scan(xi, alpha, qdeg):
    """Rows ``(Q, errdeg, bound)`` for all 0 < deg Q <= qdeg; bound is -2 - deg Q."""
    degs, W = scan.error_degrees(xi, alpha, qdeg)
    rows = []
    spec = xi.spec
    for idx in range(1, len(degs)):
        Q = Poly.from_index(spec, idx)
        rows.append((Q, int(degs[idx]), -2 - Q.deg))
    return rows, W


def worst_alpha_search(xi, qdeg_bound, adeg_depth, limit=SEARCH_LIMIT):
    """Exhaustive search for the alpha supported on ``T^-1..T^-depth`` that is hardest to approximate.

    Score of alpha: min over 0 < deg Q <= qdeg_bound of ``deg Q + deg <Q xi - alpha>``.
    Ties go to the lexicographically smallest coefficient tuple (read from T^-1 down).
    """
    spec = xi.spec
    q = spec.q
    if q ** adeg_depth * q ** (qdeg_bound + 1) > limit:
        raise SearchSpaceTooLarge("alpha search space exceeds the limit")
    W = scan.default_window(xi, qdeg_bound)
    V = scan.frac_vectors(xi, qdeg_bound, W)
    n = q ** (qdeg_bound + 1)
    qdegs = np.array([Poly.from_index(spec, i).deg if i else 0 for i in range(n)], dtype=np.int64)
    best = None
    for coeffs in itertools.product(range(q), repeat=adeg_depth):
        t = list(coeffs) + [0] * (W - adeg_depth)
        if spec.m == 1:
            from . import kernels
            pos = np.asarray(kernels.lead_positions(V, t, spec.p), dtype=np.int64)
        else:
            pos = scan._lead_positions_generic(spec, V, t)
        degs = np.where(pos < 0, -W - 1, -(pos + 1))
        score = int((degs[1:] + qdegs[1:]).min())
        if best is None or score > best[0]:
            best = (score, coeffs)
    score, coeffs = best
    num = Poly(spec, list(reversed(coeffs)))  # sum of a_e T^(depth-e)
    alpha = from_rational(num, Poly.monomial(spec, adeg_depth), max(adeg_depth, 1))
    return alpha, score


# -- monic approximation -------------------------------------------------------

def monic_solutions(xi, alpha, count):
    """Monic Q with ``deg(Q xi - alpha - P) <= -1 - deg Q``, one per convergent."""
    spec = xi.spec
    cf = cf_expand(xi, count + 1)
    out = []
    for k in range(1, cf.n + 1):
        if len(out) >= count:
            break
        if k > cf.trusted or (k + 1 > cf.deg_trusted and not cf.terminated):
            break
        R, S = cf.P(k), cf.Q(k)
        c = spec.inv(S.lc)
        R, S = R.scale(c), S.scale(c)
        try:
            X = integral_part(alpha * S)
        except UndeterminedToPrecision as exc:
            raise InsufficientTrust("alpha not known to integral precision") from exc
        g, u, v = poly_xgcd(R, S)
        P1 = (X * u) % S
        P2, rem = poly_divmod(X - R * P1, S)
        if rem:
            raise AssertionError("Bezout step failed")  # coprime convergents
        Q = S + P1
        P = R - P2
        d = (xi * Q - alpha - P).deg_upper()
        out.append(ApproxSolution(Q, P, d))
    if len(out) < count:
        raise InsufficientTrust(f"only {len(out)} monic solutions certified")
    return out


# -- Cassels pair -------------------------------------------------------------

@dataclass(frozen=True)
class PsiTable:
    """Degree-indexed approximating function: ``Psi(q^h) = q^psi(h)``."""

    entries: tuple  # ((h, psi_h), ...) with h strictly increasing

    def __post_init__(self):
        hs = [h for h, _ in self.entries]
        ps = [p for _, p in self.entries]
        if any(b <= a for a, b in zip(hs, hs[1:])):
            raise ValueError("heights must be strictly increasing")
        if any(b > a for a, b in zip(ps, ps[1:])):
            raise ValueError("psi values must be nonincreasing")

    def psi(self, h):
        for hh, p in self.entries:
            if hh == h:
                return p
        raise KeyError(h)

    def first_below(self, bound, after=None):
        """Smallest table height h (> after) with psi(h) < bound."""
        for h, p in self.entries:
            if after is not None and h <= after:
                continue
            if p < bound:
                return h
        raise TableExhausted(f"no table height with psi < {bound}")

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = [(int(r["h"]), int(r["psi_h"])) for r in reader]
        return cls(tuple(rows))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["h", "psi_h"])
            w.writerows(self.entries)


def corollary_table(hmax, slowdown=1):
    """``psi(h) = -ceil(h / (slowdown * ln(h + 2)))`` for h = 0..hmax.

    Larger ``slowdown`` decays more slowly.  Integer-exact: the ceiling is
    taken on a float quotient and then corrected against the defining
    inequality.
    """
    rows = []
    for h in range(hmax + 1):
        denom = slowdown * math.log(h + 2)
        rows.append((h, -math.ceil(h / denom - 1e-12)))
    # enforce monotonicity in the (rare) event of float jitter
    fixed = []
    cur = 0
    for h, p in rows:
        cur = min(cur, p)
        fixed.append((h, cur))
    return PsiTable(tuple(fixed))


@dataclass
class CasselsPair:
    xi: Laurent
    alpha: Laurent
    H: list  # h_2, h_3, ...: heights as degrees
    S: list  # S_0, S_1, ...
    R: list

    def certified_prec(self):
        """Every continuation of the construction agrees with xi to this precision."""
        return self.S[-1].deg - 1


def cassels_pair(psi, steps, spec, seed):
    """Build the approximants ``R_n/S_n`` and heights of the insolubility construction."""
    rng = random.Random(seed)
    T = Poly.T(spec)
    S = [Poly.one(spec), T + 1]
    R = [Poly.zero(spec), Poly.one(spec)]
    H = []
    for N in range(1, steps + 1):
        h = psi.first_below(-2 - S[N].deg, after=H[-1] if H else None)
        H.append(h)
        d = 1 + h + S[N].deg
        c = [rng.randrange(1, spec.q)] + [rng.randrange(spec.q) for _ in range(d - 1)] \
            + [rng.randrange(1, spec.q)]
        Snext = Poly(spec, c)
        Rnext = poly_divmod(Snext * R[N], S[N])[0]
        S.append(Snext)
        R.append(Rnext)
    xi = from_rational(R[-1], S[-1], S[-1].deg + 2)
    alpha = Laurent.monomial(spec, -1, 2)
    return CasselsPair(xi, alpha, H, S, R)


@dataclass
class CasselsCheck:
    n: int
    h: int
    best_err: int
    floor: int  # -2 - deg S_n
    psi_h: int
    holds: bool


def cassels_verify(pair, psi):
    """Check the insolubility chain for n = 1..steps.

    For every n the least error over all Q with deg Q <= h_{n+1} is computed
    exactly (elimination, equivalent to scanning all such Q) and compared
    with ``-2 - deg S_n`` and with ``psi(h_{n+1})``.
    """
    out = []
    for n, h in enumerate(pair.H, start=1):
        floor = -2 - pair.S[n].deg
        W = -floor + 8
        best, _ = scan.best_error(pair.xi, pair.alpha, h, W=W)
        p = psi.psi(h)
        out.append(CasselsCheck(n, h, best, floor, p, best >= floor and floor > p))
    return out
