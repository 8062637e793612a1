# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels`` (same signatures)."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef long long _inv_mod(long long a, long long p):
    cdef long long r = 1, e = p - 2
    a %= p
    while e > 0:
        if e & 1:
            r = r * a % p
        a = a * a % p
        e >>= 1
    return r


def conv_mod(a, b, long long p):
    cdef Py_ssize_t la = len(a), lb = len(b), i, j
    if la == 0 or lb == 0:
        return []
    cdef long long[:] av = np.asarray(a, dtype=np.int64)
    cdef long long[:] bv = np.asarray(b, dtype=np.int64)
    cdef long long[:] out = np.zeros(la + lb - 1, dtype=np.int64)
    cdef long long bj
    # products are < p^2; reduce only when the accumulator could overflow
    cdef long long cap = (1LL << 62) // ((p - 1) * (p - 1) + 1)
    cdef Py_ssize_t pending = 0
    for j in range(lb):
        bj = bv[j]
        if bj:
            for i in range(la):
                out[i + j] += av[i] * bj
            pending += 1
            if pending >= cap:
                for i in range(la + lb - 1):
                    out[i] %= p
                pending = 0
    for i in range(la + lb - 1):
        out[i] %= p
    return np.asarray(out).tolist()


def divmod_mod(a, b, long long p):
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la < lb:
        return [], list(a)
    r_arr = np.array(a, dtype=np.int64)
    b_arr = np.array(b, dtype=np.int64)
    q_arr = np.zeros(la - lb + 1, dtype=np.int64)
    cdef long long[:] r = r_arr
    cdef long long[:] bv = b_arr
    cdef long long[:] q = q_arr
    cdef long long inv = _inv_mod(bv[lb - 1], p)
    cdef long long c
    cdef Py_ssize_t i, j, k
    for k in range(la - lb + 1):
        i = la - lb - k
        c = r[i + lb - 1] * inv % p
        if c:
            q[i] = c
            for j in range(lb):
                r[i + j] = (r[i + j] + (p - c) * bv[j]) % p
    rem = r_arr[:lb - 1].tolist()
    while rem and rem[len(rem) - 1] == 0:
        rem.pop()
    return q_arr.tolist(), rem


def inv_series_mod(c, Py_ssize_t n, long long p):
    cdef Py_ssize_t lc = len(c), k, i, top
    cdef long long[:] cv = np.asarray(c, dtype=np.int64)
    cdef long long[:] out = np.zeros(n, dtype=np.int64)
    cdef long long b0 = _inv_mod(cv[0], p)
    cdef long long nb = (p - b0) % p
    cdef long long s
    out[0] = b0
    for k in range(1, n):
        s = 0
        top = k if k < lc - 1 else lc - 1
        for i in range(1, top + 1):
            s = (s + cv[i] * out[k - i]) % p
        out[k] = s * nb % p
    return np.asarray(out).tolist()


def lead_positions(V, target, long long p):
    Vn = np.asarray(V, dtype=np.int64)
    cdef Py_ssize_t n = Vn.shape[0]
    tn = np.asarray(target, dtype=np.int64)
    cdef Py_ssize_t w = tn.shape[0]
    Vn = Vn.reshape(n, w)
    cdef long long[:, :] Vv = Vn
    cdef long long total = p ** n
    cdef long long[:] out = np.empty(total, dtype=np.int64)
    cdef long long[:] cur = (-tn) % p
    cdef long long[:] digits = np.zeros(max(n, 1), dtype=np.int64)
    cdef long long idx
    cdef Py_ssize_t i, pos, d
    for idx in range(total):
        pos = -1
        for i in range(w):
            if cur[i] != 0:
                pos = i
                break
        out[idx] = pos
        # odometer step: each touched digit adds its row once (mod p)
        d = 0
        while d < n:
            for i in range(w):
                cur[i] = (cur[i] + Vv[d, i]) % p
            digits[d] += 1
            if digits[d] < p:
                break
            digits[d] = 0
            d += 1
    return np.asarray(out)
