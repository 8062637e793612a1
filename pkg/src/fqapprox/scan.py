"""Exhaustive and elimination-based scans of ``<Q x - theta>`` over deg Q <= D.

Coordinates of a fractional part are indexed from the top: coordinate r is
the coefficient of ``T^(-1-r)``.  A window of ``W`` coordinates is certain
when x is known to precision ``D + W``; degrees below the window are
reported as ``-W - 1`` and mean "at most that".
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .algebra import Poly
from .errors import SearchSpaceTooLarge
from .linalg import IncrementalSystem

SCAN_LIMIT = 1 << 22
DEFAULT_EXACT_WINDOW = 64


def default_window(x, D, theta=None):
    if x.exact:
        W = DEFAULT_EXACT_WINDOW + D
    else:
        W = x.prec - D
    if theta is not None and not theta.exact:
        W = min(W, theta.prec)
    return W


def frac_vectors(x, D, W):
    """Rows ``V_i`` (i = 0..D): the first W coordinates of ``<T^i x>``."""
    xs = x.at_prec(D + W) if x.prec < D + W else x
    rows = []
    for i in range(D + 1):
        rows.append([xs.coeff(-1 - r - i) for r in range(W)])
    return rows


def target_vector(theta, W):
    if theta is None:
        return [0] * W
    th = theta.at_prec(W) if theta.prec < W else theta
    return [th.coeff(-1 - r) for r in range(W)]


def error_degrees(x, theta, D, W=None, limit=SCAN_LIMIT):
    """Degree of ``<Q x - theta>`` for every Q with deg Q <= D.

    Entry ``idx`` belongs to ``Poly.from_index(spec, idx)``.  Returns
    ``(degrees, W)``; the value ``-W - 1`` means "at most -W - 1".
    """
    spec = x.spec
    if W is None:
        W = default_window(x, D, theta)
    if W < 1:
        raise SearchSpaceTooLarge("no certain coordinates at this precision")
    if spec.q ** (D + 1) > limit:
        raise SearchSpaceTooLarge(f"{spec.q}^{D + 1} polynomials exceed the scan limit")
    V = frac_vectors(x, D, W)
    t = target_vector(theta, W)
    if spec.m == 1:
        pos = kernels.lead_positions(V, t, spec.p)
    else:
        pos = _lead_positions_generic(spec, V, t)
    pos = np.asarray(pos, dtype=np.int64)
    return np.where(pos < 0, -W - 1, -(pos + 1)), W


def frac_degrees_all(x, D, W=None):
    return error_degrees(x, None, D, W)


def _lead_positions_generic(spec, V, t):
    n = len(V)
    W = len(t)
    out = np.empty(spec.q ** n, dtype=np.int64)
    for idx in range(spec.q ** n):
        c = Poly.from_index(spec, idx).c
        cur = [spec.neg(v) for v in t]
        for i, ci in enumerate(c):
            if ci:
                row = V[i]
                cur = [spec.add(a, spec.mul(ci, b)) for a, b in zip(cur, row)]
        out[idx] = next((r for r in range(W) if cur[r]), -1)
    return out


def best_error(x, theta, h, W=None):
    """Least degree of ``<Q x - theta>`` over nonzero Q with deg Q <= h.

    Exact and polynomial time: the answer is ``-(j+1)`` for the largest j
    such that some nonzero Q kills the first j coordinates.  Returns
    ``(degree, Q)``; a degree of ``-W - 1`` means "at most".
    """
    spec = x.spec
    if W is None:
        W = default_window(x, h, theta)
    V = frac_vectors(x, h, W)
    t = target_vector(theta, W)
    system = IncrementalSystem(spec, h + 1)
    best_j = 0
    snapshot = system.copy()
    for r in range(W):
        system.add_row([V[i][r] for i in range(h + 1)], t[r])
        if not system.has_nonzero_solution():
            break
        best_j = r + 1
        snapshot = system.copy()
    sol = snapshot.solution(nonzero=True)
    Q = Poly(spec, sol) if sol is not None else None
    return -(best_j + 1), Q


def brute_best_error(x, theta, h, W=None):
    """Reference implementation of :func:`best_error` by exhaustive scan."""
    degs, W = error_degrees(x, theta, h, W)
    degs = degs[1:]
    i = int(np.argmin(degs))
    return int(degs[i]), Poly.from_index(x.spec, i + 1)
