"""Congruences, higher commutators, nilpotency and supernilpotency.

Commutators are computed from cube relations: ``M(a_1, ..., a_k)`` is the
subuniverse of ``A**(2**k)`` generated by the cubes that vary one congruence
along one direction.  Coordinate ``v`` of a cube is indexed by the integer
``sum(v_i * 2**i)``, so bit 0 belongs to the first congruence.

Supernilpotency is read off 0-absorbing polynomials: ``nu(A)`` is the least
``n >= 1`` such that every ``n``-ary 0-absorbing polynomial is constantly
zero.  Those are found in the arity-``n`` clone closure (projections and
constants under the basic operations).
"""

from __future__ import annotations

import itertools
import warnings
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra, Operation, element_dtype
from .closure import DEFAULT_CAP, Closure, enumerate_subgroup, find_group, generate, sort_rows
from .terms import all_tuples
from .zmodule import AbelianCoordinates, ZModule

__all__ = [
    'Partition', 'CommutatorBudgetError', 'NoMalcevWarning', 'SupernilpotencyMismatch', 'TemplateTruncationWarning',
    'unary_translations', 'congruence_generated', 'congruence_lattice',
    'commutator', 'nilpotency_degree', 'cube_vanishing_order',
    'CloneClosure', 'clone_closure', 'AbsorbingSet', 'absorbing_polynomials',
    'AbsorbingWitness', 'find_absorbing_witness',
    'SupernilpotencyResult', 'supernilpotency_degree_absorbing', 'check_supernilpotency',
    'DEFAULT_CUBE_BUDGET',
]

DEFAULT_CUBE_BUDGET = 2 ** 26


class CommutatorBudgetError(AlgebraError):
    pass


class NoMalcevWarning(UserWarning):
    pass


class SupernilpotencyMismatch(AlgebraError):
    pass


class TemplateTruncationWarning(UserWarning):
    """An infinite operation family was cut off, so a computed congruence is only a lower bound."""


class Partition:
    """An equivalence relation on ``range(n)``, stored as class minima."""

    __slots__ = ('rep',)

    def __init__(self, rep):
        rep = np.asarray(rep, dtype=np.int64)
        if rep.ndim != 1:
            raise ValueError('representative array must be 1-d')
        if len(rep) and (np.any(rep > np.arange(len(rep))) or np.any(rep[rep] != rep)):
            raise ValueError('not a canonical representative array')
        rep.setflags(write=False)
        self.rep = rep

    @classmethod
    def from_labels(cls, labels) -> 'Partition':
        labels = labels.tolist() if isinstance(labels, np.ndarray) else list(labels)
        rep = np.empty(len(labels), dtype=np.int64)
        first = {}
        for i, lab in enumerate(labels):
            rep[i] = first.setdefault(lab, i)
        return cls(rep)

    @classmethod
    def from_classes(cls, n: int, classes: Iterable[Iterable[int]]) -> 'Partition':
        labels = np.arange(n)
        for c in classes:
            c = sorted(c)
            labels[c] = c[0]
        return cls.from_labels(labels)

    @classmethod
    def identity(cls, n: int) -> 'Partition':
        return cls(np.arange(n))

    @classmethod
    def total(cls, n: int) -> 'Partition':
        return cls(np.zeros(n, dtype=np.int64))

    @property
    def size(self) -> int:
        return len(self.rep)

    def classes(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for a, r in enumerate(self.rep.tolist()):
            out.setdefault(r, []).append(a)
        return list(out.values())

    def pairs(self) -> np.ndarray:
        a, b = np.nonzero(self.rep[:, None] == self.rep[None, :])
        return np.stack([a, b], axis=1)

    def related(self, a: int, b: int) -> bool:
        return self.rep[a] == self.rep[b]

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.rep, np.arange(self.size)))

    def is_total(self) -> bool:
        return not self.rep.any()

    def __le__(self, other: 'Partition') -> bool:
        """Refinement: every class of ``self`` lies inside a class of ``other``."""
        return bool(np.array_equal(other.rep[self.rep], other.rep))

    def __ge__(self, other):
        return other <= self

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.rep, other.rep)

    def __hash__(self):
        return hash(self.rep.tobytes())

    def meet(self, other: 'Partition') -> 'Partition':
        return Partition.from_labels(list(zip(self.rep.tolist(), other.rep.tolist())))

    def join(self, other: 'Partition') -> 'Partition':
        uf = _UnionFind(self.rep)
        for a, r in enumerate(other.rep.tolist()):
            uf.union(a, r)
        return uf.partition()

    def format(self) -> str:
        return '\n'.join(' '.join(map(str, c)) for c in self.classes())

    def __repr__(self):
        return 'Partition(' + ' | '.join(','.join(map(str, c)) for c in self.classes()) + ')'


class _UnionFind:
    def __init__(self, rep):
        self.parent = list(np.asarray(rep).tolist())

    def find(self, a):
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True

    def partition(self) -> Partition:
        # the smaller root always wins, so roots are class minima
        return Partition([self.find(a) for a in range(len(self.parent))])


def unary_translations(algebra: FiniteAlgebra, operations: Sequence[Operation] | None = None,
                       budget: int = DEFAULT_CUBE_BUDGET) -> np.ndarray:
    """All maps ``a -> f(c_1, .., a, .., c_r)`` as rows of an array, without repeats."""
    n = algebra.size
    ops = list(algebra.operations.values()) if operations is None else list(operations)
    maps = [np.arange(n)[None, :]]
    for op in ops:
        r = op.arity
        if r == 0:
            continue
        if n ** r > budget:
            raise CommutatorBudgetError(f'operation {op.name}: {n}**{r} table entries exceed {budget}')
        t = op.full_table().reshape((n,) * r).astype(np.int64)
        for pos in range(r):
            maps.append(np.moveaxis(t, pos, -1).reshape(-1, n))
    return np.unique(np.concatenate(maps), axis=0)


def congruence_generated(algebra: FiniteAlgebra, pairs, translations: np.ndarray | None = None,
                         start: Partition | None = None) -> Partition:
    """``Cg(pairs)``: the least congruence containing ``pairs`` (and ``start``)."""
    n = algebra.size
    if translations is None:
        translations = unary_translations(algebra)
    pairs = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
    pairs = pairs.reshape(-1, 2)
    if len(pairs) and (pairs.min() < 0 or pairs.max() >= n):
        raise AlgebraError(f'pair element out of range 0..{n - 1}')
    uf = _UnionFind(np.arange(n) if start is None else start.rep)
    for a, b in np.unique(pairs, axis=0).tolist():
        uf.union(a, b)
    rep = uf.partition().rep
    while True:
        # a ~ rep(a) must be respected by every translation
        u, v = translations, translations[:, rep]
        bad = rep[u] != rep[v]
        if not bad.any():
            return Partition(rep)
        for a, b in np.unique(np.stack([u[bad], v[bad]], axis=1), axis=0).tolist():
            uf.union(a, b)
        rep = uf.partition().rep


def congruence_lattice(algebra: FiniteAlgebra, translations: np.ndarray | None = None) -> list[Partition]:
    """Every congruence of a small algebra, from 0_A upwards (joins of principal congruences)."""
    n = algebra.size
    if translations is None:
        translations = unary_translations(algebra)
    principal = {congruence_generated(algebra, [(a, b)], translations)
                 for a in range(n) for b in range(a + 1, n)}
    found = {Partition.identity(n)} | principal
    frontier = list(found)
    while frontier:
        nxt = []
        for x in frontier:
            for p in principal:
                j = x.join(p)
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    return sorted(found, key=lambda p: (-len(p.classes()), p.rep.tolist()))


# commutators

def _cube_generators(congruences: Sequence[Partition], dtype) -> np.ndarray:
    k = len(congruences)
    bits = (np.arange(2 ** k)[None, :] >> np.arange(k)[:, None]) & 1      # (k, 2**k)
    out = []
    for i, alpha in enumerate(congruences):
        pairs = alpha.pairs()
        out.append(np.where(bits[i][None, :] == 0, pairs[:, :1], pairs[:, 1:]))
    return np.unique(np.concatenate(out), axis=0).astype(dtype)


def _malcev_known(algebra, malcev):
    if malcev is not None:
        return bool(malcev)
    from .loop import find_malcev
    return find_malcev(algebra).term is not None


def commutator(algebra: FiniteAlgebra, congruences: Sequence[Partition],
               budget: int = DEFAULT_CUBE_BUDGET, cap: int = DEFAULT_CAP, malcev=None) -> Partition:
    """``[a_1, ..., a_k]`` by the cube construction.

    Raises :class:`CommutatorBudgetError` when ``N**(2**k)`` exceeds
    ``budget``, or when the cube relation has more than ``cap`` members.
    ``malcev`` is a known Mal'cev term (or True); when None one is searched
    for, and a :class:`NoMalcevWarning` is issued if there is none, since the
    construction only characterizes the commutator in the Mal'cev case.
    """
    k = len(congruences)
    n = algebra.size
    if k < 2:
        raise ValueError('a commutator needs at least two congruences')
    if any(c.size != n for c in congruences):
        raise ValueError('congruences must be on the domain of the algebra')
    width = 2 ** k
    if n ** width > budget:
        raise CommutatorBudgetError(
            f'{k}-fold commutator needs {n}**{width} = {n ** width} cube entries, budget is {budget}')
    if not _malcev_known(algebra, malcev):
        warnings.warn('no Mal\'cev term verified; the cube commutator may differ from the '
                      'term-condition commutator', NoMalcevWarning, stacklevel=2)
    ops = algebra.operations_up_to(max(2, k))
    if algebra.template is not None:
        warnings.warn(f'template operations of arity > {max(2, k)} are left out of the cube closure; '
                      'the commutator returned is a lower bound', TemplateTruncationWarning, stacklevel=2)
    gens = _cube_generators(congruences, element_dtype(n))
    cl = generate(algebra, gens, cap=cap, operations=ops)
    if not cl.saturated or cl.rows is None:
        raise CommutatorBudgetError(f'cube relation of the {k}-fold commutator exceeds the cap {cap}')
    rows = cl.rows.astype(np.int64)
    # pairs across bit 0 must agree except for the pair at the all-ones corner
    lo, hi = rows[:, 0:width - 2:2], rows[:, 1:width - 1:2]
    keep = (lo == hi).all(axis=1)
    pairs = rows[keep][:, [width - 2, width - 1]]
    return congruence_generated(algebra, pairs, unary_translations(algebra, ops))


def nilpotency_degree(algebra: FiniteAlgebra, cap: int = 8, budget: int = DEFAULT_CUBE_BUDGET,
                      malcev=None) -> int | None:
    """Least ``n`` with ``[1, [1, ... [1, 1]]]`` (``n`` brackets) equal to ``0_A``.

    None if the series stabilizes above ``0_A`` or ``cap`` is reached.
    """
    n = algebra.size
    one = Partition.total(n)
    malcev = _malcev_known(algebra, malcev)
    gamma = commutator(algebra, [one, one], budget=budget, malcev=malcev)
    for degree in range(1, cap + 1):
        if gamma.is_identity():
            return degree
        nxt = commutator(algebra, [one, gamma], budget=budget, malcev=malcev)
        if nxt == gamma:
            return None
        gamma = nxt
    return None


def cube_vanishing_order(algebra: FiniteAlgebra, max_k: int = 3, budget: int = DEFAULT_CUBE_BUDGET,
                         cap: int = DEFAULT_CAP, malcev=None) -> int | None:
    """Least ``k >= 2`` with ``[1, ..., 1]`` (``k`` entries) equal to ``0_A``.

    None when it does not vanish up to ``max_k`` or the next order is out of budget.
    """
    one = Partition.total(algebra.size)
    malcev = _malcev_known(algebra, malcev)
    for k in range(2, max_k + 1):
        if algebra.size ** (2 ** k) > budget:
            return None
        if commutator(algebra, [one] * k, budget=budget, cap=cap, malcev=malcev).is_identity():
            return k
    return None


# clone closures and absorbing polynomials

@dataclass
class CloneClosure:
    """Members of ``Pol_n`` as value tables over ``A**n`` in odometer order."""

    arity: int
    closure: Closure
    cap: int
    complete: bool = True       # False when an infinite family was cut off

    @property
    def saturated(self) -> bool:
        return self.closure.saturated and self.complete

    @property
    def size(self) -> int | None:
        return self.closure.size

    @property
    def tables(self) -> np.ndarray | None:
        return self.closure.rows

    def contains(self, table) -> bool:
        return self.closure.contains(table)


_clone_cache: 'weakref.WeakKeyDictionary[FiniteAlgebra, dict]' = weakref.WeakKeyDictionary()


def clone_closure(algebra: FiniteAlgebra, n: int, cap: int = DEFAULT_CAP) -> CloneClosure:
    """``Pol_n(A)`` generated from projections and constants.

    Template families contribute the members given by their
    ``closure_arity``; without one, members of arity at most ``n`` are used
    and the result never counts as saturated.  The cap bounds the number of tables that are listed; closures that are
    abelian groups under a basic operation are still decided exactly past it.
    """
    cache = _clone_cache.setdefault(algebra, {})
    key = (n, cap)
    if key in cache:
        return cache[key]
    size = algebra.size
    grid = all_tuples(size, n)
    consts = np.repeat(np.arange(size)[:, None], len(grid), axis=1)
    gens = np.concatenate([grid.T, consts]).astype(element_dtype(size))
    ops, complete = algebra.clone_operations(n)
    cl = generate(algebra, gens, cap=cap, operations=ops)
    cache[key] = CloneClosure(n, cl, cap, complete)
    return cache[key]


def _zero_mask(size: int, n: int, zero: int) -> np.ndarray:
    """Tuples of ``A**n`` with at least one coordinate equal to ``zero``."""
    return (all_tuples(size, n) == zero).any(axis=1)


@dataclass
class AbsorbingSet:
    """The 0-absorbing members of a clone closure."""

    arity: int
    tables: np.ndarray | None          # listed members, lexicographic; None if too many
    count: int | None
    saturated: bool
    strategy: str

    @property
    def only_zero(self) -> bool | None:
        if not self.saturated or self.count is None:
            return None
        return self.count == 1

    @property
    def complete(self) -> bool:
        return self.saturated and self.tables is not None


def _absorbing_delta(basis, coords: AbelianCoordinates, size: int, n: int, zero: int):
    """``Dp = sum over T of (-1)**(n-|T|) p(x_T)``, the 0-absorbing part of each ``p``.

    ``D`` is additive and fixes absorbing functions, so it maps a subgroup of
    functions onto its absorbing members.
    """
    grid = all_tuples(size, n)
    out = []
    enc = [coords.coords[np.asarray(b, dtype=np.int64)] for b in basis]     # (N**n, rank)
    acc = [np.zeros_like(e) for e in enc]
    for r in range(n + 1):
        sign = -1 if (n - r) % 2 else 1
        for T in itertools.combinations(range(n), r):
            masked = np.full_like(grid, zero)
            masked[:, list(T)] = grid[:, list(T)]
            idx = np.ravel_multi_index(tuple(masked.T), (size,) * n) if n else np.zeros(1, dtype=np.int64)
            for a, e in zip(acc, enc):
                a += sign * e[idx]
    for a in acc:
        out.append(coords.decode(a.reshape(len(a), -1) % coords.exponent).reshape(-1))
    return out


def absorbing_polynomials(algebra: FiniteAlgebra, n: int, cap: int = DEFAULT_CAP) -> AbsorbingSet:
    """All 0-absorbing members of ``Pol_n(A)`` (lexicographically ordered tables)."""
    if algebra.zero is None:
        raise AlgebraError('the algebra has no designated zero')
    zero = algebra.zero
    clone = clone_closure(algebra, n, cap)
    cl = clone.closure
    mask = _zero_mask(algebra.size, n, zero)
    if cl.rows is not None:
        rows = cl.rows
        keep = (rows[:, mask] == zero).all(axis=1)
        found = rows[keep]
        return AbsorbingSet(n, found, len(found) if cl.saturated else None, cl.saturated, 'filter')
    if cl.module is None or cl.group is None or cl.group.identity != zero:
        return AbsorbingSet(n, None, None, False, 'indeterminate')
    coords = cl.module.coords
    width = algebra.size ** n
    delta = _absorbing_delta(cl.basis, coords, algebra.size, n, zero)
    module = ZModule(coords, width)
    kbasis = [d.astype(element_dtype(algebra.size)) for d in delta if module.insert(d)]
    count = module.size()
    tables = None
    if count <= cap:
        tables = enumerate_subgroup(kbasis, cl.group, width, element_dtype(algebra.size), cap)
    return AbsorbingSet(n, tables, count, True, 'module')


@dataclass
class AbsorbingWitness:
    """A 0-absorbing polynomial that is not constantly zero, and a point where it is not."""

    arity: int
    table: np.ndarray | None
    point: tuple[int, ...] | None
    value: int | None
    saturated: bool
    source: str = ''

    @property
    def found(self) -> bool:
        return self.table is not None


def _first_nonzero(table, size, n, zero):
    i = int(np.flatnonzero(np.asarray(table) != zero)[0])
    point = tuple(int(v) for v in np.unravel_index(i, (size,) * n)) if n else ()
    return point, int(table[i])


def find_absorbing_witness(algebra: FiniteAlgebra, n: int, cap: int = DEFAULT_CAP) -> AbsorbingWitness:
    """Look for a nonzero 0-absorbing ``n``-ary polynomial.

    Basic operations of arity ``n`` applied to the projections are tried
    first; otherwise the lexicographically least nonzero absorbing member of
    the closure is returned.  The point is the first nonzero entry in
    odometer order.
    """
    if algebra.zero is None:
        raise AlgebraError('the algebra has no designated zero')
    zero, size = algebra.zero, algebra.size
    mask = _zero_mask(size, n, zero)
    for op in algebra.operations_up_to(max(n, 1)):
        if op.arity != n or n == 0:
            continue
        table = np.asarray(op.full_table())
        if (table[mask] == zero).all() and (table != zero).any():
            point, value = _first_nonzero(table, size, n, zero)
            return AbsorbingWitness(n, table.copy(), point, value, True, f'basic:{op.name}')
    found = absorbing_polynomials(algebra, n, cap)
    if found.tables is not None:
        nonzero = found.tables[(found.tables != zero).any(axis=1)]
        if len(nonzero):
            table = sort_rows(nonzero)[0]
            point, value = _first_nonzero(table, size, n, zero)
            return AbsorbingWitness(n, table, point, value, found.saturated, 'closure')
        return AbsorbingWitness(n, None, None, None, found.saturated, 'closure')
    if found.saturated and found.count == 1:
        return AbsorbingWitness(n, None, None, None, True, 'closure')
    # too many to list, or undecided
    return AbsorbingWitness(n, None, None, None, False, found.strategy)


@dataclass
class SupernilpotencyResult:
    """``nu(A)`` with per-arity evidence.

    ``status`` is ``exact``, ``not-supernilpotent-up-to-cap`` (every arity
    checked had a nonzero absorbing polynomial) or ``indeterminate`` (a
    closure could not be decided).
    """

    degree: int | None
    status: str
    arities: list[dict] = field(default_factory=list)


def supernilpotency_degree_absorbing(algebra: FiniteAlgebra, cap: int = DEFAULT_CAP,
                                     max_arity: int = 4) -> SupernilpotencyResult:
    """Least ``n >= 1`` such that every ``n``-ary 0-absorbing polynomial is constantly zero."""
    if algebra.zero is None:
        raise AlgebraError('the algebra has no designated zero')
    evidence = []
    for n in range(1, max_arity + 1):
        w = find_absorbing_witness(algebra, n, cap)
        evidence.append({'arity': n, 'saturated': w.saturated, 'nonzero_absorbing': w.found,
                         'witness_point': w.point, 'witness_value': w.value, 'source': w.source})
        if w.found:
            continue
        if not w.saturated:
            return SupernilpotencyResult(None, 'indeterminate', evidence)
        return SupernilpotencyResult(n, 'exact', evidence)
    return SupernilpotencyResult(None, 'not-supernilpotent-up-to-cap', evidence)


def check_supernilpotency(algebra: FiniteAlgebra, cap: int = DEFAULT_CAP, max_arity: int = 4,
                          budget: int = DEFAULT_CUBE_BUDGET) -> tuple[SupernilpotencyResult, int | None]:
    """``nu(A)`` together with the cube vanishing order, checked against each other.

    The ``k``-fold ``[1, ..., 1]`` vanishes exactly when all ``k``-ary
    absorbing polynomials do, so the order must be ``max(nu, 2)`` whenever
    both are known.  A disagreement raises :class:`SupernilpotencyMismatch`.
    """
    res = supernilpotency_degree_absorbing(algebra, cap, max_arity)
    order = cube_vanishing_order(algebra, max_k=max(2, max_arity), budget=budget, cap=cap)
    if res.status == 'exact' and order is not None and order != max(res.degree, 2):
        raise SupernilpotencyMismatch(f'nu = {res.degree} but the cube commutator vanishes at order {order}')
    if res.status == 'not-supernilpotent-up-to-cap' and order is not None:
        raise SupernilpotencyMismatch(f'cube commutator vanishes at order {order} but absorbing '
                                      f'polynomials survive up to arity {max_arity}')
    return res, order
