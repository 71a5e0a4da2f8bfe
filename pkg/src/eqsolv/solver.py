"""Solving ``h(x) = 0`` and checking ``h = 0`` by bounded-support search.

Over a supernilpotent Mal'cev algebra every value of ``h`` is attained on a
tuple with at most ``d`` nonzero entries, ``d`` depending only on the
algebra.  The theoretical ``d`` comes from a Ramsey bound and is huge; a
small empirical ``d'`` (certified where possible) is what is used for search.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra
from .closure import DEFAULT_CAP
from .congruence import clone_closure
from .loop import LoopStructure, loop_rdiv
from .terms import Const, Term, all_tuples, evaluate, evaluate_many, random_term

__all__ = [
    'RamseyTower', 'ramsey_upper', 'SupportBound', 'support_bound', 'EmpiricalDegree',
    'empirical_support_degree', 'support_need', 'SolveReport', 'normalize', 'solve', 'check_identity',
    'brute_force_solve', 'colex_supports', 'DEFAULT_BIT_BUDGET', 'DEFAULT_SEARCH_BUDGET',
    'DEFAULT_D_CEILING',
]

DEFAULT_BIT_BUDGET = 1 << 16
DEFAULT_SEARCH_BUDGET = 10 ** 7
DEFAULT_D_CEILING = 10
_BATCH = 1 << 15


# Ramsey bounds

@dataclass(frozen=True)
class RamseyTower:
    """A bound too large to write out, kept as the expression that defines it."""

    expr: str

    def __str__(self):
        return self.expr


def _single(s: int, k: int, l: int, bits: int):
    """Upper bound for ``s``-uniform hypergraphs, ``k`` colours, homogeneous set of size ``l``."""
    if s == 0 or l <= s:
        return l
    if k == 1:
        return l
    if s == 1:
        return k * (l - 1) + 1
    # stepping up: an end-homogeneous sequence of length t contains the
    # homogeneous set once t - 1 reaches the (s-1)-uniform bound for l - 1
    inner = _single(s - 1, k, l - 1, bits)
    if isinstance(inner, RamseyTower):
        return RamseyTower(f'R_{s}(k={_short(k)}; l={_short(l)})')
    t = inner + 1
    # log2 of the result is about log2(k) * C(t, s-1)
    if t > 10 ** 6 or k.bit_length() * math.comb(t, s - 1) > bits:
        return RamseyTower(f'R_{s}(k={_short(k)}; l={_short(l)})')
    req = 1
    for j in range(t - 2, -1, -1):
        req = k ** math.comb(j, s - 2) * (req - 1) + 2
    return req


def _short(x) -> str:
    if isinstance(x, RamseyTower):
        return str(x)
    s = str(x)
    return s if len(s) <= 24 else f'~10^{len(s) - 1}'


def ramsey_upper(n: int, k: int, l: int, bits: int = DEFAULT_BIT_BUDGET):
    """``d`` such that every ``k``-colouring of the ``<= n``-subsets of a ``d``-set has an
    ``l``-subset on which subsets of equal size share a colour.

    Composes single-size bounds ``v_s = R_s(k; v_{s-1})`` from ``v_0 = l``.
    Returns an int, or a :class:`RamseyTower` when the digits would exceed
    ``bits`` bits.  Not the exact Ramsey number.
    """
    if n < 0 or k < 1 or l < 1:
        raise ValueError('need n >= 0, k >= 1, l >= 1')
    v = l
    for s in range(1, n + 1):
        if isinstance(v, RamseyTower):
            v = RamseyTower(f'R_{s}(k={_short(k)}; {v})')
            continue
        v = _single(s, k, v, bits)
        if isinstance(v, int) and v.bit_length() > bits:
            v = RamseyTower(f'R_{s}(k={_short(k)}; l=...)')
    return v


# support bounds

@dataclass
class SupportBound:
    nu: int
    e: int
    l: int
    k: int
    d: int | RamseyTower
    d_practical: int | None = None
    provenance: str | None = None        # empirical | user-supplied | theoretical-if-small

    def d_text(self) -> str:
        if isinstance(self.d, RamseyTower):
            return str(self.d)
        s = str(self.d)
        return s if len(s) <= 60 else f'{s[:20]}...({len(s)} digits)'


def support_bound(algebra: FiniteAlgebra, loop: LoopStructure, nu: int | None,
                  d_practical: int | None = None, provenance: str | None = None,
                  ceiling: int = DEFAULT_D_CEILING, bits: int = DEFAULT_BIT_BUDGET) -> SupportBound:
    """``l = e (nu-1)!``, ``k = e**(nu N)`` and ``d = ramsey_upper(nu-1, k, l)``."""
    if nu is None:
        raise AlgebraError('the supernilpotency degree is indeterminate')
    if nu < 1:
        raise ValueError('nu must be positive')
    e = loop.exponent
    l = e * math.factorial(nu - 1)
    k = e ** (nu * algebra.size)
    d = ramsey_upper(nu - 1, k, l, bits)
    if d_practical is None and isinstance(d, int) and d <= ceiling:
        d_practical, provenance = d, 'theoretical-if-small'
    return SupportBound(nu, e, l, k, d, d_practical, provenance)


def _subset_indices(size: int, m: int):
    """For every ``T`` (by increasing size): indices mapping a tuple to the tuple zeroed off ``T``."""
    grid = all_tuples(size, m)
    out = []
    for r in range(m + 1):
        for T in itertools.combinations(range(m), r):
            masked = np.zeros_like(grid)
            masked[:, list(T)] = grid[:, list(T)]
            out.append((r, np.ravel_multi_index(tuple(masked.T), (size,) * m) if m else np.zeros(1, np.int64)))
    return out


def support_need(tables: np.ndarray, size: int, m: int, zero: int = 0) -> np.ndarray:
    """Least ``|T|`` with ``f(r_T) = f(r)``, per table and tuple ``r`` (odometer order).

    ``zero`` must be 0 here; other zeros are handled by relabelling first.
    """
    if zero != 0:
        raise ValueError('relabel so that the zero is 0')
    tables = np.asarray(tables)
    need = np.full(tables.shape, m, dtype=np.int64)
    done = np.zeros(tables.shape, dtype=bool)
    for r, idx in _subset_indices(size, m):
        hit = ~done & (tables[:, idx] == tables)
        need[hit] = r
        done |= hit
    return need


@dataclass
class EmpiricalDegree:
    d: int
    status: str                 # certified | heuristic
    arity: int                  # certification arity m0
    method: str
    examples: int
    witness: dict | None = None

    @property
    def certified(self) -> bool:
        return self.status == 'certified'


def _relabel(algebra):
    # permutation of the domain swapping the zero with 0
    z = algebra.zero
    perm = np.arange(algebra.size)
    perm[[0, z]] = perm[[z, 0]]
    return perm


def empirical_support_degree(algebra: FiniteAlgebra, max_arity: int = 4, trials: int = 300,
                             max_length: int = 30, seed: int = 0, cap: int = DEFAULT_CAP) -> EmpiricalDegree:
    """Least ``d'`` with ``f(r_T) = f(r)`` for some ``|T| <= d'``, over arity ``max_arity``.

    Members of ``Pol_k`` for ``k < max_arity`` are members of
    ``Pol_max_arity`` with dummy variables, so one arity covers all smaller
    ones.  The answer is certified when the whole closure at that arity is
    listed, or when a sampled polynomial already needs ``max_arity``
    coordinates (the largest value possible); otherwise it is a heuristic
    lower estimate.
    """
    if algebra.zero is None:
        raise AlgebraError('the algebra has no designated zero')
    m, n = max_arity, algebra.size
    perm = _relabel(algebra)

    def evaluate_need(tables):
        # relabel values and arguments so that the zero is 0
        t = perm[np.asarray(tables, dtype=np.int64)]
        grid = all_tuples(n, m)
        src = np.ravel_multi_index(tuple(perm[grid].T), (n,) * m) if m else np.zeros(1, np.int64)
        t = t[:, src]
        return support_need(t, n, m)

    def result(need, status, method, count):
        i, j = np.unravel_index(int(np.argmax(need)), need.shape) if need.size else (0, 0)
        d = int(need.max()) if need.size else 0
        point = tuple(int(v) for v in all_tuples(n, m)[j]) if need.size else ()
        return EmpiricalDegree(d, status, m, method, count, {'table_index': int(i), 'point': point})

    rng = np.random.default_rng(seed)
    tables = []
    grid = all_tuples(n, m)
    for _ in range(trials):
        t = random_term(algebra, rng, max(m, 1), max_length)
        tables.append(evaluate_many(t, algebra, grid, range(1, m + 1)))
    # sums and products of projections are frequent extremal cases
    for op in algebra.operations_up_to(2):
        if op.arity == 2 and m:
            acc = grid[:, 0]
            for c in range(1, m):
                acc = op(acc, grid[:, c])
            tables.append(np.asarray(acc))
    sampled = np.stack(tables) if tables else np.zeros((0, n ** m), dtype=np.int64)
    need = evaluate_need(sampled) if len(sampled) else np.zeros((0, 0), dtype=np.int64)
    if need.size and need.max() == m:
        return result(need, 'certified', 'sampled-maximal', len(sampled))

    clone = clone_closure(algebra, m, cap)
    if clone.saturated and clone.tables is not None:
        rows = clone.tables
        parts = [evaluate_need(rows[i:i + 2048]) for i in range(0, len(rows), 2048)]
        full = np.concatenate(parts)
        return result(full, 'certified', 'exhaustive', len(rows))
    return result(need, 'heuristic', 'sampled', len(sampled))


# solving

@dataclass
class SolveReport:
    verdict: str                          # solvable | unsolvable | identity-holds | identity-fails
    witness: tuple[int, ...] | None = None
    value: int | None = None
    mode: str = 'exact'
    bound: int | None = None
    exact: bool = True
    evaluations: int = 0
    elapsed: float = 0.0
    count: int | None = None              # number of solutions, full enumeration only

    @property
    def positive(self) -> bool:
        return self.verdict in ('solvable', 'identity-holds')

    def record(self) -> dict:
        return {'verdict': self.verdict, 'witness': list(self.witness) if self.witness is not None else None,
                'value': self.value, 'mode': self.mode, 'bound': self.bound, 'exact': self.exact,
                'evaluations': self.evaluations, 'count': self.count}


def normalize(f: Term, g: Term, loop: LoopStructure | None = None) -> Term:
    """``f / g``, which is the zero exactly where ``f = g``."""
    return loop_rdiv(f, g)


def colex_supports(m: int, k: int) -> list[tuple[int, ...]]:
    """``k``-subsets of ``0..m-1`` in colexicographic order."""
    return sorted(itertools.combinations(range(m), k), key=lambda c: c[::-1])


def _arity(h: Term, m: int | None) -> int:
    top = max(h.variables, default=0)
    if m is None:
        return top
    if m < top:
        raise AlgebraError(f'the term uses x{top} but m = {m}')
    return m


def _zero(algebra, loop):
    z = loop.zero if loop is not None else algebra.zero
    if z is None:
        raise AlgebraError('the algebra has no designated zero')
    return z


def solve(h: Term, algebra: FiniteAlgebra, d_use: int, loop: LoopStructure | None = None,
          m: int | None = None, certified: bool = False, target: int | None = None) -> SolveReport:
    """Search ``h = 0`` over tuples supported on ``min(d_use, m)`` coordinates.

    Supports come in colexicographic order and values on a support in
    odometer order, so the first witness is canonical.  The verdict is exact
    when ``d_use >= m`` or the bound is ``certified``.
    """
    if d_use < 0:
        raise ValueError('d_use must be non-negative')
    start = time.perf_counter()
    m = _arity(h, m)
    zero = _zero(algebra, loop)
    goal = zero if target is None else target
    n = algebra.size
    k = min(d_use, m)
    exact = d_use >= m or certified
    mode = 'exact' if d_use >= m else 'bounded'
    vals = all_tuples(n, k)
    evals = 0
    for T in colex_supports(m, k):
        for s in range(0, len(vals), _BATCH):
            chunk = vals[s:s + _BATCH]
            pts = np.full((len(chunk), m), zero, dtype=np.int64)
            pts[:, list(T)] = chunk
            out = evaluate_many(h, algebra, pts, range(1, m + 1))
            hit = np.flatnonzero(out == goal)
            if len(hit):
                i = int(hit[0])
                evals += i + 1
                w = tuple(int(v) for v in pts[i])
                assert evaluate(h, algebra, list(w)) == goal
                return SolveReport('solvable', w, goal, mode, d_use, exact, evals,
                                   time.perf_counter() - start)
            evals += len(chunk)
    return SolveReport('unsolvable', None, None, mode, d_use, exact, evals, time.perf_counter() - start)


def check_identity(h: Term, algebra: FiniteAlgebra, d_use: int, loop: LoopStructure | None = None,
                   m: int | None = None, certified: bool = False) -> SolveReport:
    """``h = 0`` holds identically iff no ``h / a = 0`` with ``a != 0`` is solvable.

    Needs the loop operations in ``algebra`` (see :func:`~eqsolv.loop.with_loop`).
    """
    start = time.perf_counter()
    m = _arity(h, m)
    zero = _zero(algebra, loop)
    evals = 0
    mode = 'exact' if d_use >= m else 'bounded'
    for a in range(algebra.size):
        if a == zero:
            continue
        rep = solve(normalize(h, Const(a)), algebra, d_use, loop, m, certified)
        evals += rep.evaluations
        if rep.verdict == 'solvable':
            value = evaluate(h, algebra, list(rep.witness))
            assert value != zero
            return SolveReport('identity-fails', rep.witness, value, mode, d_use, rep.exact, evals,
                               time.perf_counter() - start)
    return SolveReport('identity-holds', None, None, mode, d_use, d_use >= m or certified, evals,
                       time.perf_counter() - start)


def brute_force_solve(h: Term, algebra: FiniteAlgebra, loop: LoopStructure | None = None,
                      m: int | None = None, budget: int = DEFAULT_SEARCH_BUDGET,
                      target: int | None = None) -> SolveReport:
    """Exact verdict from all ``N**m`` tuples; also counts the solutions."""
    start = time.perf_counter()
    m = _arity(h, m)
    zero = _zero(algebra, loop)
    goal = zero if target is None else target
    n = algebra.size
    if n ** m > budget:
        raise AlgebraError(f'{n}**{m} assignments exceed the budget of {budget}')
    pts = all_tuples(n, m)
    out = evaluate_many(h, algebra, pts, range(1, m + 1))
    hits = np.flatnonzero(out == goal)
    if len(hits):
        w = tuple(int(v) for v in pts[hits[0]])
        return SolveReport('solvable', w, goal, 'brute-force', None, True, len(pts),
                           time.perf_counter() - start, len(hits))
    return SolveReport('unsolvable', None, None, 'brute-force', None, True, len(pts),
                       time.perf_counter() - start, 0)
