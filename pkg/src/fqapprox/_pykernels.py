"""Pure-Python (numpy-assisted) implementations of the hot kernels.

Every function works on coefficient lists over a prime field F_p, stored
low-to-high, with entries already reduced to ``0 <= c < p``.  The compiled
module ``_ckernels`` exposes the same functions with the same results.
"""
import numpy as np

_NUMPY_MIN_LEN = 24
_CHUNK = 1 << 15


def conv_mod(a, b, p):
    """Product of two coefficient lists, reduced mod ``p``."""
    if not a or not b:
        return []
    if len(a) < len(b):
        a, b = b, a
    if len(b) >= _NUMPY_MIN_LEN and p < (1 << 20):
        out = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return (out % p).tolist()
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a):
                out[i + j] += ai * bj
    return [c % p for c in out]


def divmod_mod(a, b, p):
    """Polynomial long division; ``b`` must have a nonzero last entry."""
    lb = len(b)
    if len(a) < lb:
        return [], list(a)
    inv = pow(b[-1], p - 2, p)
    r = list(a)
    q = [0] * (len(a) - lb + 1)
    for i in range(len(a) - lb, -1, -1):
        c = r[i + lb - 1] * inv % p
        if c:
            q[i] = c
            for j in range(lb):
                r[i + j] = (r[i + j] - c * b[j]) % p
    r = r[:lb - 1]
    while r and r[-1] == 0:
        r.pop()
    return q, r


def inv_series_mod(c, n, p):
    """First ``n`` coefficients of ``1 / (c[0] + c[1] z + ...)``; ``c[0] != 0``."""
    b0 = pow(c[0], p - 2, p)
    nb = -b0 % p
    out = [b0] + [0] * (n - 1)
    lc = len(c)
    for k in range(1, n):
        s = 0
        for i in range(1, min(k, lc - 1) + 1):
            s += c[i] * out[k - i]
        out[k] = s * nb % p
    return out


def lead_positions(V, target, p):
    """Leading nonzero index of ``sum_i c_i V[i] - target`` for every ``c``.

    ``c`` runs over ``F_p^n`` in base-``p`` order (``c_0`` least significant).
    Index 0 of a vector is its most significant position; -1 marks an all-zero
    result.
    """
    V = np.asarray(V, dtype=np.int64)
    n = V.shape[0]
    w = V.shape[1] if V.ndim == 2 else len(target)
    V = V.reshape(n, w)
    t = np.asarray(target, dtype=np.int64).reshape(w)
    total = p ** n
    out = np.empty(total, dtype=np.int64)
    powers = p ** np.arange(n, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        digits = (idx[:, None] // powers) % p
        vals = (digits @ V - t) % p
        nz = vals != 0
        pos = nz.argmax(axis=1)
        pos[~nz.any(axis=1)] = -1
        out[start:start + len(idx)] = pos
    return out
