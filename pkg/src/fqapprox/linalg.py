"""Incremental Gaussian elimination over F_q.

Rows are fed one at a time; the system answers whether it is still
consistent, its rank, and produces a nonzero solution when one exists.
The basis is kept fully reduced, so a new row is eliminated against all
pivots at once.  Prime fields use numpy rows; extension fields go through
the field tables entry by entry.
"""
from __future__ import annotations

import numpy as np


class IncrementalSystem:
    """Linear system ``rows . c = rhs`` over F_q, built row by row."""

    def __init__(self, spec, ncols):
        self.spec = spec
        self.ncols = ncols
        self.consistent = True
        self._prime = spec.m == 1
        self._cols = []  # pivot column of each basis row
        if self._prime:
            self._rows = np.zeros((0, ncols), dtype=np.int64)
            self._rhs = np.zeros(0, dtype=np.int64)
        else:
            self._rows = []
            self._rhs = []

    @property
    def rank(self):
        return len(self._cols)

    @property
    def rhs_nonzero(self):
        return any(int(b) for b in self._rhs)

    def copy(self):
        other = IncrementalSystem.__new__(IncrementalSystem)
        other.spec, other.ncols, other.consistent = self.spec, self.ncols, self.consistent
        other._prime = self._prime
        other._cols = list(self._cols)
        if self._prime:
            other._rows, other._rhs = self._rows, self._rhs  # replaced, never mutated
        else:
            other._rows = [list(r) for r in self._rows]
            other._rhs = list(self._rhs)
        return other

    def add_row(self, coeffs, rhs=0):
        if not self.consistent:
            return False
        if self._prime:
            return self._add_prime(coeffs, rhs)
        return self._add_generic(coeffs, rhs)

    def _add_prime(self, coeffs, rhs):
        p = self.spec.p
        row = np.asarray(coeffs, dtype=np.int64) % p
        b = int(rhs) % p
        if self._cols:
            f = row[self._cols]
            row = (row - f @ self._rows) % p
            b = (b - int(f @ self._rhs)) % p
        nz = np.flatnonzero(row)
        if not len(nz):
            if b:
                self.consistent = False
            return self.consistent
        lead = int(nz[0])
        inv = pow(int(row[lead]), p - 2, p)
        row = row * inv % p
        b = b * inv % p
        g = self._rows[:, lead].copy()
        rows = (self._rows - np.outer(g, row)) % p
        rhs_v = (self._rhs - g * b) % p
        self._rows = np.vstack([rows, row[None, :]])
        self._rhs = np.append(rhs_v, b)
        self._cols.append(lead)
        return True

    def _add_generic(self, coeffs, rhs):
        spec = self.spec
        row = list(coeffs)
        b = rhs
        for col, prow, pb in zip(self._cols, self._rows, self._rhs):
            f = row[col]
            if f:
                row = [spec.sub(x, spec.mul(f, y)) for x, y in zip(row, prow)]
                b = spec.sub(b, spec.mul(f, pb))
        lead = next((i for i, v in enumerate(row) if v), None)
        if lead is None:
            if b:
                self.consistent = False
            return self.consistent
        inv = spec.inv(row[lead])
        row = [spec.mul(v, inv) for v in row]
        b = spec.mul(b, inv)
        for i, prow in enumerate(self._rows):
            f = prow[lead]
            if f:
                self._rows[i] = [spec.sub(x, spec.mul(f, y)) for x, y in zip(prow, row)]
                self._rhs[i] = spec.sub(self._rhs[i], spec.mul(f, b))
        self._rows.append(row)
        self._rhs.append(b)
        self._cols.append(lead)
        return True

    def has_nonzero_solution(self):
        if not self.consistent:
            return False
        return self.rank < self.ncols or self.rhs_nonzero

    def solution(self, nonzero=True):
        """A solution vector; nonzero when ``nonzero`` and one exists."""
        if not self.consistent:
            return None
        spec = self.spec
        pivots = set(self._cols)
        free = [i for i in range(self.ncols) if i not in pivots]
        x = [0] * self.ncols
        if nonzero and free and not self.rhs_nonzero:
            x[free[0]] = 1
        for col, prow, pb in zip(self._cols, self._rows, self._rhs):
            v = int(pb)
            for i in free:
                if x[i] and prow[i]:
                    v = spec.sub(v, spec.mul(int(prow[i]), x[i]))
            x[col] = v
        if nonzero and not any(x):
            return None
        return x
