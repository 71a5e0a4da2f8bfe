"""Subuniverses of finite powers ``A**L`` generated by a set of rows.

This is the single engine behind clone closures (rows are function tables on
``A**n``) and the cube relations used for commutators (rows are
``2**k``-cubes).

Closure is breadth-first composition with the basic operations.  Two
shortcuts keep the large cases tractable, both exact:

* if some basic operation makes ``A`` a group, a subuniverse is in
  particular a subgroup of ``A**L``, and the subgroup generated by a set is
  enumerated directly (coset by coset when the group is abelian);
* an operation that is affine in every argument with respect to an abelian
  group operation only needs to be applied to the generators of that
  subgroup, since its value on sums expands into a sum of values on
  generators.

Everything else falls back to semi-naive closure over all members.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, Operation, element_dtype
from .zmodule import AbelianCoordinates, ZModule

__all__ = ['RowSet', 'Closure', 'GroupStructure', 'find_group', 'generate', 'enumerate_subgroup', 'sort_rows',
           'DEFAULT_CAP', 'DEFAULT_CELL_BUDGET']

DEFAULT_CAP = 10 ** 6
DEFAULT_CELL_BUDGET = 2 ** 28
_CHUNK = 1 << 16


class RowSet:
    """An append-only set of equal-length rows with exact membership tests."""

    def __init__(self, width: int, dtype=np.uint8):
        self.width = width
        self.dtype = dtype
        self._buf = np.empty((64, width), dtype=dtype)
        self._n = 0
        self._index: dict[int, int | list[int]] = {}
        rng = np.random.default_rng(0x5EED)
        self._weights = rng.integers(1, 2 ** 63, size=width, dtype=np.uint64) | np.uint64(1)

    def __len__(self):
        return self._n

    @property
    def rows(self) -> np.ndarray:
        return self._buf[:self._n]

    def _hash(self, rows):
        rows = np.asarray(rows)
        if rows.shape[1] == 0:
            return np.zeros(rows.shape[0], dtype=np.uint64)
        with np.errstate(over='ignore'):
            return (rows.astype(np.uint64) * self._weights).sum(axis=1)

    def _find(self, h, row):
        hit = self._index.get(h)
        if hit is None:
            return -1
        for i in (hit if isinstance(hit, list) else (hit,)):
            if np.array_equal(self._buf[i], row):
                return i
        return -1

    def _grow(self, extra):
        need = self._n + extra
        if need > len(self._buf):
            cap = max(need, 2 * len(self._buf))
            buf = np.empty((cap, self.width), dtype=self.dtype)
            buf[:self._n] = self._buf[:self._n]
            self._buf = buf

    def _register(self, h, i):
        hit = self._index.get(h)
        if hit is None:
            self._index[h] = i
        elif isinstance(hit, list):
            hit.append(i)
        else:
            self._index[h] = [hit, i]

    def contains(self, row) -> bool:
        row = np.asarray(row, dtype=self.dtype).reshape(1, -1)
        return self._find(int(self._hash(row)[0]), row[0]) >= 0

    def add(self, rows) -> np.ndarray:
        """Insert rows; return the ones that were new, in first-seen order."""
        rows = np.asarray(rows, dtype=self.dtype).reshape(-1, self.width)
        if len(rows) == 0:
            return rows
        hashes = self._hash(rows)
        _, first = np.unique(hashes, return_index=True)
        first.sort()
        new = []
        for i in first.tolist():
            h = int(hashes[i])
            if self._find(h, rows[i]) >= 0:
                continue
            self._grow(1)
            self._buf[self._n] = rows[i]
            self._register(h, self._n)
            self._n += 1
            new.append(i)
        # rows sharing a hash with an earlier row of the same batch
        if len(first) < len(rows):
            dup = np.ones(len(rows), dtype=bool)
            dup[first] = False
            for i in np.flatnonzero(dup).tolist():
                h = int(hashes[i])
                if self._find(h, rows[i]) < 0:
                    self._grow(1)
                    self._buf[self._n] = rows[i]
                    self._register(h, self._n)
                    self._n += 1
                    new.append(i)
        return rows[sorted(new)]

    def add_unique(self, rows) -> None:
        """Insert rows known to be new and pairwise distinct."""
        rows = np.asarray(rows, dtype=self.dtype).reshape(-1, self.width)
        self._grow(len(rows))
        hashes = self._hash(rows).tolist()
        start = self._n
        self._buf[start:start + len(rows)] = rows
        for j, h in enumerate(hashes):
            self._register(h, start + j)
        self._n += len(rows)


@dataclass(frozen=True)
class GroupStructure:
    op: Operation
    identity: int
    inverse: np.ndarray
    abelian: bool


def find_group(operations: Iterable[Operation]) -> GroupStructure | None:
    """The first binary operation among ``operations`` that is a group operation."""
    for op in operations:
        if op.arity != 2:
            continue
        n = op.size
        t = op.full_table().reshape(n, n).astype(np.int64)
        ar = np.arange(n)
        ids = [e for e in range(n) if np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar)]
        if not ids:
            continue
        e = ids[0]
        if not all(len(set(row.tolist())) == n for row in t) or not all(len(set(col.tolist())) == n for col in t.T):
            continue
        lhs = t[t[:, :, None], ar[None, None, :]]    # (x*y)*z
        rhs = t[ar[:, None, None], t[None, :, :]]    # x*(y*z)
        if not np.array_equal(lhs, rhs):
            continue
        inverse = np.argmax(t == e, axis=1)
        return GroupStructure(op, e, inverse, bool(np.array_equal(t, t.T)))
    return None


def _is_multi_affine(op: Operation, group: GroupStructure, budget: int = 2 ** 22) -> bool:
    """``f(.., x+y-z, ..) = f(.., x, ..) + f(.., y, ..) - f(.., z, ..)`` in every argument."""
    n = op.size
    r = op.arity
    if r == 0:
        return True
    if n ** (r + 1) > budget:
        return False
    add = group.op.full_table().reshape(n, n).astype(np.int64)
    inv = group.inverse
    grid = np.indices((n,) * (r + 1)).reshape(r + 1, -1)
    for pos in range(r):
        x, y = grid[pos], grid[r]
        others = [grid[j] for j in range(r) if j != pos]
        e = np.full_like(x, group.identity)

        def at(v):
            args = list(others)
            args.insert(pos, v)
            return np.asarray(op(*args), dtype=np.int64)

        # affine in one argument: f(x+y) = f(x) - f(e) + f(y)
        lhs = at(add[x, y])
        rhs = add[add[at(x), inv[at(e)]], at(y)]
        if not np.array_equal(lhs, rhs):
            return False
    return True


@dataclass
class Closure:
    """Result of :func:`generate`.

    ``rows`` holds the members in lexicographic order when they were
    materialized.  When the abelian shortcut applies, ``module`` represents the
    members exactly even if there are too many to list, and ``basis`` holds
    rows generating it as a group.
    """

    saturated: bool
    size: int | None
    rows: np.ndarray | None = None
    basis: list[np.ndarray] = field(default_factory=list)
    module: ZModule | None = None
    group: GroupStructure | None = None
    strategy: str = 'naive'

    def __len__(self):
        if self.size is None:
            raise TypeError('size unknown: closure not saturated')
        return self.size

    @property
    def materialized(self) -> bool:
        return self.rows is not None and self.saturated

    def contains(self, row) -> bool:
        if self.module is not None:
            return self.module.contains(row)
        if self.rows is None:
            raise ValueError('closure was not materialized')
        return bool((self.rows == np.asarray(row)).all(axis=1).any())


class _CapReached(Exception):
    pass


def sort_rows(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0 or rows.shape[1] == 0:
        return rows
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def _index_chunks(sizes: Sequence[int], chunk: int = _CHUNK):
    total = int(np.prod(sizes, dtype=object))
    for start in range(0, total, chunk):
        flat = np.arange(start, min(total, start + chunk), dtype=np.int64)
        yield np.unravel_index(flat, sizes)


def _semi_naive(op: Operation, rows: np.ndarray, old: int, dtype):
    """``op`` on all tuples of ``rows`` that use at least one row at index >= ``old``."""
    total = len(rows)
    r = op.arity
    if r == 0 or total == old:
        return
    for p in range(r):
        sizes = [old] * p + [total - old] + [total] * (r - p - 1)
        if 0 in sizes:
            continue
        for idx in _index_chunks(sizes):
            args = [rows[ix + old] if j == p else rows[ix] for j, ix in enumerate(idx)]
            yield np.asarray(op(*args), dtype=dtype)


def generate(algebra: FiniteAlgebra, generators, cap: int = DEFAULT_CAP,
             cell_budget: int = DEFAULT_CELL_BUDGET,
             operations: Iterable[Operation] | None = None,
             materialize: bool = True, shortcuts: bool = True) -> Closure:
    """The subuniverse of ``A**L`` generated by the rows of ``generators``.

    ``cap`` bounds the number of rows ever listed (and ``cell_budget`` the
    number of row entries).  Past it, enumerating closures stop with
    ``saturated=False``; module-represented closures stay exact and are just
    not listed.  ``operations`` defaults to the basic operations.
    """
    n = algebra.size
    dtype = element_dtype(n)
    generators = np.asarray(generators, dtype=dtype)
    if generators.ndim != 2:
        raise ValueError('generators must be a 2-d array')
    width = generators.shape[1]
    ops = list(algebra.operations.values()) if operations is None else list(operations)
    limit = cap if width == 0 else min(cap, max(1, cell_budget // width))

    consts = [np.full((1, width), int(op()), dtype=dtype) for op in ops if op.arity == 0]
    gens = np.concatenate([generators, *consts]) if consts else generators
    ops = [op for op in ops if op.arity > 0]

    if len(gens) == 0:
        return Closure(True, 0, gens, strategy='empty')
    group = find_group(ops) if shortcuts else None
    if group is None:
        return _generate_naive(gens, ops, limit, dtype)

    affine, general = [], []
    for op in ops:
        if op is group.op:
            continue
        if op.arity == 1 and np.array_equal(op.full_table().astype(np.int64), group.inverse):
            continue
        if group.abelian and _is_multi_affine(op, group):
            affine.append(op)
        else:
            general.append(op)
    if group.abelian and not general:
        try:
            coords = AbelianCoordinates(group.op.full_table().reshape(n, n), group.identity)
        except ValueError:
            coords = None
        if coords is not None:
            return _generate_module(gens, affine, group, coords, limit, dtype, materialize)
    return _generate_group(gens, affine, general, group, limit, dtype)


def _generate_naive(gens, ops, limit, dtype) -> Closure:
    rows = RowSet(gens.shape[1], dtype)
    rows.add(gens)
    saturated = True
    processed = {op.name: 0 for op in ops}
    try:
        if len(rows) > limit:
            raise _CapReached
        while any(processed[op.name] < len(rows) for op in ops):
            for op in ops:
                old = processed[op.name]
                snapshot = rows.rows.copy()
                processed[op.name] = len(snapshot)
                for cand in _semi_naive(op, snapshot, old, dtype):
                    rows.add(cand)
                    if len(rows) > limit:
                        raise _CapReached
    except _CapReached:
        saturated = False
    out = sort_rows(rows.rows.copy())
    return Closure(saturated, len(out) if saturated else None, out, strategy='naive')


class _Subgroup:
    """Incrementally grown subgroup of ``A**L`` under a pointwise group operation."""

    def __init__(self, width, group: GroupStructure, dtype, limit):
        self.rows = RowSet(width, dtype)
        n = group.op.size
        self.mul = group.op.full_table().reshape(n, n)
        self.abelian = group.abelian
        self.limit = limit
        self.dtype = dtype
        self.generators: list[np.ndarray] = []
        self.rows.add(np.full((1, width), group.identity, dtype=dtype))

    def extend(self, g) -> bool:
        g = np.asarray(g, dtype=self.dtype)
        if self.rows.contains(g):
            return False
        if self.abelian:
            self._extend_abelian(g)
        else:
            self._extend_bfs(g)
        self.generators.append(g)
        return True

    def _extend_abelian(self, g):
        # S + <g> is the disjoint union of S + c*g for 0 <= c < t,
        # where t is the order of g modulo S
        t, mult = 1, g
        while not self.rows.contains(mult):
            mult = self.mul[mult, g]
            t += 1
        if len(self.rows) * t > self.limit:
            raise _CapReached
        base = self.rows.rows.copy()
        cur = g
        for _ in range(1, t):
            self.rows.add_unique(self.mul[base, cur[None, :]])
            cur = self.mul[cur, g]

    def _extend_bfs(self, g):
        # every product of generators is a chain of right multiplications
        gens = [*self.generators, g]
        frontier = self.rows.add(self.mul[self.rows.rows, g[None, :]])
        while len(frontier):
            if len(self.rows) > self.limit:
                raise _CapReached
            frontier = np.concatenate([self.rows.add(self.mul[frontier, x[None, :]]) for x in gens])


def enumerate_subgroup(basis: Sequence[np.ndarray], group: GroupStructure, width: int, dtype,
                       limit: int = DEFAULT_CAP) -> np.ndarray | None:
    """All elements of the subgroup of ``A**width`` generated by ``basis``, or None past ``limit``."""
    sub = _Subgroup(width, group, dtype, limit)
    try:
        for g in basis:
            sub.extend(g)
    except _CapReached:
        return None
    return sort_rows(sub.rows.rows.copy())


def _generate_group(gens, affine, general, group, limit, dtype) -> Closure:
    width = gens.shape[1]
    sub = _Subgroup(width, group, dtype, limit)
    identity_row = np.full(width, group.identity, dtype=dtype)
    saturated = True
    try:
        for g in gens:
            sub.extend(g)
        done_affine = {op.name: 0 for op in affine}
        done_general = {op.name: 0 for op in general}

        def pending():
            return (any(done_affine[op.name] < len(sub.generators) + 1 for op in affine)
                    or any(done_general[op.name] < len(sub.rows) for op in general))

        while pending():
            for op in affine:
                basis = np.stack([identity_row, *sub.generators])
                old = done_affine[op.name]
                done_affine[op.name] = len(basis)
                for cand in _semi_naive(op, basis, old, dtype):
                    for row in cand:
                        sub.extend(row)
            for op in general:
                snapshot = sub.rows.rows.copy()
                old = done_general[op.name]
                done_general[op.name] = len(snapshot)
                for cand in _semi_naive(op, snapshot, old, dtype):
                    for row in cand:
                        sub.extend(row)
    except _CapReached:
        saturated = False
    out = sort_rows(sub.rows.rows.copy())
    strategy = ('abelian-group' if group.abelian else 'group') + ('+naive' if general else '')
    return Closure(saturated, len(out) if saturated else None, out, list(sub.generators),
                   group=group, strategy=strategy)


def _generate_module(gens, affine, group, coords, limit, dtype, materialize) -> Closure:
    width = gens.shape[1]
    module = ZModule(coords, width)
    basis: list[np.ndarray] = []
    for g in gens:
        if module.insert(g):
            basis.append(g)
    identity_row = np.full(width, group.identity, dtype=dtype)
    done = {op.name: 0 for op in affine}
    while any(done[op.name] < len(basis) + 1 for op in affine):
        for op in affine:
            rows = np.stack([identity_row, *basis])
            old = done[op.name]
            done[op.name] = len(rows)
            for cand in _semi_naive(op, rows, old, dtype):
                for row in cand:
                    if module.insert(row):
                        basis.append(row)
    size = module.size()
    rows = None
    if materialize and size <= limit:
        rows = enumerate_subgroup(basis, group, width, dtype, limit)
    return Closure(True, size, rows, basis, module, group, 'module')
