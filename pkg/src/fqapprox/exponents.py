"""Finite-height profiles of Diophantine exponents and their predicted limits.

Profiles are prefix evidence only.  The plain exponents (omega, mu) are
read at height ``q^h`` and use ratio ``-best_err / h``; the uniform ones
must hold for every height in ``[q^h, q^(h+1))``, so their ratio is
``-best_err / (h + 1)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

from . import orbit
from .algebra import NEG_INF
from .contfrac import omega_profile
from .errors import (
    InsufficientTrust,
    KTooSmall,
    PreconditionViolated,
    StrategyInapplicable,
    UndeterminedToPrecision,
)
from .scan import best_error, brute_best_error

KINDS = ("omega", "omega_hat", "mu", "mu_hat")
_UNIFORM = {"omega_hat", "mu_hat"}


@dataclass(frozen=True)
class ExponentProfile:
    heights: tuple
    best_err: tuple
    ratios: tuple
    kind: str

    def estimate(self):
        """Max (plain kinds) or min (uniform kinds) of the ratios over the top half of heights."""
        if not self.ratios:
            return None
        top = self.ratios[len(self.ratios) // 2:]
        return min(top) if self.kind in _UNIFORM else max(top)

    @property
    def label(self):
        return "prefix evidence"


def _ratio(err, h, kind):
    den = h + 1 if kind in _UNIFORM else h
    return Fraction(-int(err), den)


def _profiles(heights, best, kinds):
    out = []
    for kind in kinds:
        out.append(ExponentProfile(tuple(heights), tuple(best),
                                   tuple(_ratio(e, h, kind) for h, e in zip(heights, best)), kind))
    return tuple(out)


def omega_profile_matrix(xi, theta, Hdeg_max, heights=None, mode="elimination"):
    """``(omega, omega_hat)`` profiles of ``min deg <Q xi - theta>`` over nonzero Q, deg Q <= h.

    ``mode="scan"`` enumerates every Q (and raises SearchSpaceTooLarge when
    that is infeasible); ``"elimination"`` computes the same minimum by
    incremental linear algebra.
    """
    hs = list(heights) if heights is not None else list(range(1, Hdeg_max + 1))
    hs = [h for h in hs if 1 <= h <= Hdeg_max]
    best = []
    cur = None
    for h in hs:
        e = (brute_best_error if mode == "scan" else best_error)(xi, theta, h)[0]
        cur = e if cur is None else min(cur, e)
        best.append(cur)
    return _profiles(hs, best, ("omega", "omega_hat"))


def _constructed_candidates(np_, Hdeg_max, max_index=48):
    """Candidates from the explicit constructions with height <= Hdeg_max."""
    cands = []
    if np_.kind == "zero":
        cf = np_.xi_cf(max_index)
        for k in range(1, cf.trusted + 1):
            if cf.dQ(k) > Hdeg_max:
                break
            g = orbit.convergent_matrix(cf, k)
            cands.append(orbit.OrbitCandidate(g, orbit.orbit_error(np_, g), k=k, strategy="M_k"))
        return cands
    if np_.kind == "rational":
        cf = np_.xi_cf(max_index)
        for k in range(1, cf.trusted + 1):
            try:
                c = orbit.gamma_rational(np_, k)
            except (KTooSmall, InsufficientTrust):
                continue
            if c.hdeg > Hdeg_max:
                break
            c.strategy = "rational"
            cands.append(c)
        return cands
    cf = np_.xi_cf(max_index)
    ycf = np_.y_cf(max_index)
    seen = set()
    for k in range(2, cf.trusted + 1):
        for strategy, kw in (("sw2", {"k": k}), ("jk_tau", {"k": k})):
            try:
                c = orbit.gamma_irrational(np_, strategy, max_index=max_index - 2, **kw)
            except (StrategyInapplicable, InsufficientTrust, UndeterminedToPrecision):
                continue
            if c.hdeg <= Hdeg_max and c.gamma not in seen:
                seen.add(c.gamma)
                c.strategy = strategy
                cands.append(c)
    for j in range(1, ycf.trusted):
        try:
            c = orbit.gamma_irrational(np_, "sw", j=j, max_index=max_index - 2)
        except (StrategyInapplicable, InsufficientTrust, UndeterminedToPrecision):
            continue
        if c.hdeg <= Hdeg_max and c.gamma not in seen:
            seen.add(c.gamma)
            c.strategy = "sw"
            cands.append(c)
    return cands


def shell_minima(np_, Hdeg_max, mode="brute"):
    """``{h: least errdeg}`` over shells 1..Hdeg_max with at least one candidate."""
    if mode == "brute":
        res = orbit.brute_orbit(np_, Hdeg_max)
        return {h: e for h, (e, _) in res.shells.items() if h >= 1}
    if mode != "constructed":
        raise ValueError(f"unknown mode {mode!r}")
    out = {}
    for c in _constructed_candidates(np_, Hdeg_max):
        h = c.hdeg
        if h >= 1 and c.errdeg != NEG_INF:
            out[h] = min(out.get(h, c.errdeg), c.errdeg)
    return dict(sorted(out.items()))


def mu_profile(np_, Hdeg_max, mode="brute"):
    """``(mu, mu_hat)`` profiles; best_err at h is the least error over shells <= h.

    Shell 0 is skipped (the ratio is undefined there), as are heights
    before the first shell with a candidate.
    """
    minima = shell_minima(np_, Hdeg_max, mode)
    hs, best = [], []
    cur = None
    for h in range(1, Hdeg_max + 1):
        if h in minima:
            cur = minima[h] if cur is None else min(cur, minima[h])
        if cur is not None:
            hs.append(h)
            best.append(cur)
    return _profiles(hs, best, ("mu", "mu_hat"))


def estimate_omega(cf):
    """Prefix estimate of omega from the continued fraction (None if no evidence)."""
    return omega_profile(cf).estimate()


INF = math.inf


@dataclass(frozen=True)
class PredictionRecord:
    case: str  # 'zero' | 'rational' | 'irrational'
    mu: Fraction | float
    mu_hat: Fraction | float
    mu_is_lower_bound: bool
    mu_hat_is_lower_bound: bool


def _as_exponent(w):
    if w is None:
        raise PreconditionViolated("exponent input required")
    if w == INF or w == "inf":
        return INF
    w = Fraction(w)
    if w < 1:
        raise PreconditionViolated("irrationality exponents are at least 1")
    return w


def predicted_exponents(case, omega_xi, omega_y=None):
    """Predicted ``(mu, mu_hat)`` for the three target classes.

    ``case`` is a NormalizedPair or one of 'zero', 'rational', 'irrational'.
    Infinite inputs are handled as limits.
    """
    kind = case.kind if isinstance(case, orbit.NormalizedPair) else case
    w = _as_exponent(omega_xi)
    if kind == "zero":
        return PredictionRecord(kind, Fraction(1), Fraction(0) if w == INF else 1 / w, False, False)
    if kind == "rational":
        if w == INF:
            return PredictionRecord(kind, Fraction(1), Fraction(0), False, False)
        return PredictionRecord(kind, w / (w + 1), 1 / (w + 1), False, False)
    if kind != "irrational":
        raise ValueError(f"unknown case {kind!r}")
    wy = _as_exponent(omega_y)
    if w == INF:
        hat = Fraction(0)
    elif wy == INF:
        hat = 1 / (4 * w)
    else:
        hat = (wy + 1) / (2 * (2 * wy + 1) * w)
    return PredictionRecord(kind, Fraction(1, 3), hat, True, True)


PROFILE_COLUMNS = ["h", "best_err", "ratio_num", "ratio_den", "kind"]


def profile_csv(profiles):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROFILE_COLUMNS)
    for prof in profiles:
        for h, e, r in zip(prof.heights, prof.best_err, prof.ratios):
            w.writerow([h, int(e), r.numerator, r.denominator, prof.kind])
    return buf.getvalue()
