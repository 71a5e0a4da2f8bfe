"""Subgroups of ``G**L`` for a finite abelian group ``G``, without enumerating them.

``G`` is identified with a direct sum of cyclic groups, and ``G**L`` embeds
into ``Z_M**D`` with ``M`` the exponent of ``G``.  A subgroup is then a
``Z_M``-submodule, kept in Howell form separately for each prime power
dividing ``M``.  That gives exact membership tests and the exact size.
"""

from __future__ import annotations

import math
from functools import reduce

import numpy as np

__all__ = ['AbelianCoordinates', 'LocalHowell', 'ZModule', 'factorize']


def factorize(n: int) -> dict[int, int]:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class AbelianCoordinates:
    """An explicit isomorphism between an abelian group table and ``Z_d1 + ... + Z_dc``."""

    def __init__(self, table: np.ndarray, identity: int):
        n = table.shape[0]
        self.size = n
        self.table = table.astype(np.int64)
        self.identity = identity
        orders = [self._order(a) for a in range(n)]
        basis, span = self._basis(orders)
        if basis is None:
            raise ValueError('could not decompose the group into cyclic factors')
        self.basis = basis
        self.orders = [orders[g] for g in basis]
        self.exponent = reduce(math.lcm, self.orders, 1)
        # coords[a] = coordinates of a, each scaled into Z_exponent
        self.coords = np.zeros((n, len(basis)), dtype=np.int64)
        self._from_coords = {}
        for a, coef in span.items():
            scaled = tuple(c * (self.exponent // d) for c, d in zip(coef, self.orders))
            self.coords[a] = scaled
            self._from_coords[scaled] = a
        self.decode_table = None
        if len(basis) <= 3 and self.exponent ** len(basis) <= 1 << 22:
            shape = (self.exponent,) * len(basis)
            flat = np.full(self.exponent ** len(basis), -1, dtype=np.int64)
            for key, a in self._from_coords.items():
                flat[np.ravel_multi_index(key, shape) if key else 0] = a
            self.decode_table = flat

    def _order(self, a):
        k, x = 1, a
        while x != self.identity:
            x = self.table[x, a]
            k += 1
        return k

    def _basis(self, orders):
        n = self.size
        basis = []
        span = {self.identity: ()}
        by_order = sorted(range(n), key=lambda a: (-orders[a], a))
        while len(span) < n:
            for g in by_order:
                if g in span:
                    continue
                # <g> must meet the current span trivially
                x, ok = g, True
                for _ in range(orders[g] - 1):
                    if x in span:
                        ok = False
                        break
                    x = self.table[x, g]
                if ok:
                    break
            else:
                return None, None
            new = {}
            x = self.identity
            for c in range(orders[g]):
                for a, coef in span.items():
                    new[self.table[a, x]] = coef + (c,)
                x = self.table[x, g]
            if len(new) != len(span) * orders[g]:
                return None, None
            basis.append(g)
            span = new
        # pad coordinate tuples of early entries to full length
        c = len(basis)
        return basis, {a: coef + (0,) * (c - len(coef)) for a, coef in span.items()}

    @property
    def rank(self) -> int:
        return len(self.basis)

    def encode(self, rows: np.ndarray) -> np.ndarray:
        """Rows of elements, shape ``(..., L)``, to vectors in ``Z_M**(L*c)``."""
        rows = np.asarray(rows, dtype=np.int64)
        return self.coords[rows].reshape(*rows.shape[:-1], -1)

    def decode(self, vectors: np.ndarray) -> np.ndarray:
        c = self.rank
        v = np.asarray(vectors, dtype=np.int64) % self.exponent
        v = v.reshape(*v.shape[:-1], -1, c)
        if c == 0:
            return np.full(v.shape[:-1], self.identity, dtype=np.int64)
        if self.decode_table is not None:
            idx = np.ravel_multi_index(tuple(np.moveaxis(v, -1, 0)), (self.exponent,) * c)
            return self.decode_table[idx]
        out = np.empty(v.shape[:-1], dtype=np.int64)
        for pos in np.ndindex(out.shape):
            out[pos] = self._from_coords[tuple(int(t) for t in v[pos])]
        return out


class LocalHowell:
    """A submodule of ``Z_q**dim``, ``q = p**k``, kept in Howell form."""

    def __init__(self, p: int, k: int, dim: int):
        self.p, self.k, self.q = p, k, p ** k
        self.dim = dim
        self.rows: dict[int, tuple[np.ndarray, int]] = {}   # pivot column -> (row, valuation)

    def _valuation(self, x: int) -> int:
        x %= self.q
        if x == 0:
            return self.k
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.q
        while True:
            nz = np.flatnonzero(v)
            if len(nz) == 0:
                return v
            c = int(nz[0])
            hit = self.rows.get(c)
            if hit is None:
                return v
            row, j = hit
            x = int(v[c])
            if x % (self.p ** j):
                return v
            v = (v - (x // self.p ** j) * row) % self.q

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def insert(self, v) -> bool:
        grew = False
        todo = [np.asarray(v, dtype=np.int64) % self.q]
        while todo:
            w = self.reduce(todo.pop())
            nz = np.flatnonzero(w)
            if len(nz) == 0:
                continue
            grew = True
            c = int(nz[0])
            x = int(w[c])
            j = self._valuation(x)
            unit = x // self.p ** j
            w = (w * pow(unit, -1, self.q)) % self.q
            old = self.rows.get(c)
            self.rows[c] = (w, j)
            if old is not None:
                todo.append(old[0])
            if j < self.k:
                todo.append((w * self.p ** (self.k - j)) % self.q)
        return grew

    def log_size(self) -> int:
        """``log_p`` of the number of elements."""
        return sum(self.k - j for _, j in self.rows.values())


class ZModule:
    """A subgroup of ``G**width`` for an abelian group ``G``."""

    def __init__(self, coords: AbelianCoordinates, width: int):
        self.coords = coords
        self.width = width
        dim = width * coords.rank
        self.parts = [LocalHowell(p, k, dim) for p, k in factorize(coords.exponent).items()]

    def _split(self, row):
        vec = self.coords.encode(np.asarray(row).reshape(1, -1))[0]
        return [(part, vec % part.q) for part in self.parts]

    def contains(self, row) -> bool:
        return all(part.contains(v) for part, v in self._split(row))

    def insert(self, row) -> bool:
        grew = False
        for part, v in self._split(row):
            grew |= part.insert(v)
        return grew

    def size(self) -> int:
        return math.prod(part.p ** part.log_size() for part in self.parts)
