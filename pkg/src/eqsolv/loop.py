"""Mal'cev terms and the loop they induce.

For a Mal'cev term ``m`` and an element ``0``, ``x*y = m(x, 0, y)`` has
``0`` as a two-sided neutral element; when its table is a Latin square the
two divisions are read off the table.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra, Operation
from .closure import RowSet
from .terms import App, Const, Term, TermError, Var, evaluate_many, parse_term

__all__ = [
    'MalcevCheck', 'MalcevSearch', 'LoopStructure', 'LoopError', 'NotNilpotentWarning',
    'verify_malcev', 'find_malcev', 'derive_loop', 'left_power', 'with_loop', 'LOOP_OPS',
]

LOOP_OPS = ('_mul', '_ldiv', '_rdiv')


class LoopError(AlgebraError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotNilpotentWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MalcevCheck:
    ok: bool
    counterexample: tuple[int, int] | None = None    # (x, y)
    identity: str | None = None                      # which identity failed
    value: int | None = None

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return 'Mal\'cev identities hold'
        x, y = self.counterexample
        args = (x, x, y) if self.identity == 'm(x,x,y)=y' else (y, x, x)
        return f'm{args} = {self.value} != {y}'


def verify_malcev(algebra: FiniteAlgebra, candidate: Term) -> MalcevCheck:
    """Check ``m(x,x,y) = y`` and then ``m(y,x,x) = y`` for all ``x, y``.

    The first failure in the order ``x`` major, ``y`` minor is reported.
    """
    if isinstance(candidate, str):
        candidate = parse_term(candidate, algebra)
    extra = [v for v in candidate.variables if v not in (1, 2, 3)]
    if extra:
        raise TermError(f'a Mal\'cev candidate may only use x1, x2, x3, found x{extra[0]}')
    n = algebra.size
    x, y = np.divmod(np.arange(n * n), n)
    for name, cols in (('m(x,x,y)=y', (x, x, y)), ('m(y,x,x)=y', (y, x, x))):
        vals = evaluate_many(candidate, algebra, np.stack(cols, axis=1), (1, 2, 3)).astype(np.int64)
        bad = np.flatnonzero(vals != y)
        if len(bad):
            i = int(bad[0])
            return MalcevCheck(False, (int(x[i]), int(y[i])), name, int(vals[i]))
    return MalcevCheck(True)


@dataclass(frozen=True)
class MalcevSearch:
    term: Term | None
    saturated: bool
    explored: int


def find_malcev(algebra: FiniteAlgebra, cap: int = 200_000) -> MalcevSearch:
    """Breadth-first search for a Mal'cev term among the basic operations.

    Ternary term functions are only tracked on the points ``(x,x,y)`` and
    ``(y,x,x)``, which is all the identities look at; since composition is
    pointwise, two terms that agree there stay interchangeable.  The first
    term found, in discovery order, is returned.  Template families are not
    searched.
    """
    n = algebra.size
    x, y = np.divmod(np.arange(n * n), n)
    pts = np.concatenate([np.stack([x, x, y], 1), np.stack([y, x, x], 1)])
    target = np.concatenate([y, y])
    ops = list(algebra.operations.values())
    seen = RowSet(len(pts), np.int32)
    terms: list[Term] = []

    def offer(row, term):
        if len(seen.add(row[None, :])):
            terms.append(term)
            return np.array_equal(row, target)
        return False

    for i in (1, 2, 3):
        if offer(pts[:, i - 1].astype(np.int32), Var(i)):
            return MalcevSearch(terms[-1], True, len(terms))
    for op in ops:
        if op.arity == 0 and offer(np.full(len(pts), int(op()), dtype=np.int32), App(op.name)):
            return MalcevSearch(terms[-1], True, len(terms))
    old = 0
    while old < len(terms):
        total = len(terms)
        rows = seen.rows.copy()
        for op in ops:
            r = op.arity
            if r == 0:
                continue
            # argument tuples using at least one term of the newest level
            for combo in np.ndindex(*(total,) * r):
                if max(combo) < old:
                    continue
                val = np.asarray(op(*[rows[c] for c in combo]), dtype=np.int32)
                if offer(val, App(op.name, tuple(terms[c] for c in combo))):
                    return MalcevSearch(terms[-1], True, len(terms))
                if len(terms) > cap:
                    return MalcevSearch(None, False, len(terms))
        old = total
    return MalcevSearch(None, True, len(terms))


@dataclass(frozen=True, eq=False)
class LoopStructure:
    """Loop tables on ``range(size)``.

    ``mul[x, y] = x*y``, ``ldiv[x, y] = x \\ y`` and ``rdiv[y, x] = y / x``.
    """

    zero: int
    mul: np.ndarray
    ldiv: np.ndarray
    rdiv: np.ndarray
    exponent: int

    @property
    def size(self) -> int:
        return len(self.mul)

    def power(self, x: int, n: int) -> int:
        return left_power(self, x, n)

    def product(self, values) -> int:
        """Left-associated product; the empty product is the neutral element."""
        return reduce(lambda a, b: int(self.mul[a, b]), values, self.zero)

    def axioms_hold(self) -> bool:
        n = self.size
        a = np.arange(n)
        x, y = a[:, None], a[None, :]
        m = self.mul
        return bool(
            np.array_equal(m[self.zero], a) and np.array_equal(m[:, self.zero], a)
            and np.array_equal(self.ldiv[x, m[x, y]], np.broadcast_to(y, (n, n)))
            and np.array_equal(self.rdiv[m[y, x], x], np.broadcast_to(y, (n, n)))
            and np.array_equal(m[x, self.ldiv[x, y]], np.broadcast_to(y, (n, n)))
            and np.array_equal(m[self.rdiv[y, x], x], np.broadcast_to(y, (n, n))))


def left_power(loop: LoopStructure, x: int, n: int) -> int:
    """``((x*x)*x)...*x`` with ``n`` factors."""
    if n < 1:
        raise ValueError('power must be positive')
    v = x
    for _ in range(n - 1):
        v = int(loop.mul[v, x])
    return v


def _latin_witness(table):
    """First row or column of ``table`` that is not a permutation, with a repeated value."""
    n = len(table)
    for kind, lines in (('row', table), ('column', table.T)):
        for i, line in enumerate(lines):
            vals, counts = np.unique(line, return_counts=True)
            if len(vals) < n:
                return kind, i, int(vals[np.argmax(counts > 1)])
    return None


def _exponent(mul, zero):
    # x^j = R_x^j(0), so x^j = 0 exactly when the cycle of 0 under R_x divides j
    e = 1
    for x in range(len(mul)):
        j, v = 1, int(mul[zero, x])
        while v != zero:
            v = int(mul[v, x])
            j += 1
        e = math.lcm(e, j)
    return e


def derive_loop(algebra: FiniteAlgebra, malcev: Term | str, zero: int | None = None,
                check_nilpotent: bool = True) -> LoopStructure:
    """The loop ``x*y = m(x, 0, y)`` with its division tables and exponent.

    Nilpotence is only checked to issue a :class:`NotNilpotentWarning`; the
    tables exist whenever the multiplication is a Latin square.
    """
    if isinstance(malcev, str):
        malcev = parse_term(malcev, algebra)
    if zero is None:
        zero = algebra.zero
    if zero is None or not 0 <= zero < algebra.size:
        raise AlgebraError('a zero element in the domain is required')
    check = verify_malcev(algebra, malcev)
    if not check:
        raise LoopError(f'not a Mal\'cev term: {check.describe()}', check.counterexample)
    n = algebra.size
    x, y = np.divmod(np.arange(n * n), n)
    mul = evaluate_many(malcev, algebra, np.stack([x, np.full_like(x, zero), y], 1), (1, 2, 3))
    mul = mul.astype(np.int64).reshape(n, n)
    bad = _latin_witness(mul)
    if bad is not None:
        kind, i, v = bad
        raise LoopError(f'm(x,{zero},y) is not a Latin square: {kind} {i} repeats {v}', bad)
    ldiv = np.empty_like(mul)
    rdiv = np.empty_like(mul)
    a = np.arange(n)
    for i in range(n):
        ldiv[i, mul[i]] = a          # i * a = mul[i, a]
        rdiv[mul[:, i], i] = a       # a * i = mul[a, i]
    if check_nilpotent:
        from .congruence import CommutatorBudgetError, nilpotency_degree
        try:
            degree = nilpotency_degree(algebra, malcev=malcev)
        except CommutatorBudgetError:
            degree = -1
        if degree is None:
            warnings.warn('the algebra is not nilpotent; the divisions need not be polynomials',
                          NotNilpotentWarning, stacklevel=2)
    for t in (mul, ldiv, rdiv):
        t.setflags(write=False)
    return LoopStructure(zero, mul, ldiv, rdiv, _exponent(mul, zero))


def with_loop(algebra: FiniteAlgebra, loop: LoopStructure) -> FiniteAlgebra:
    """``algebra`` expanded by ``_mul``, ``_ldiv`` and ``_rdiv`` (``_rdiv(y, x) = y/x``)."""
    if loop.size != algebra.size:
        raise AlgebraError('loop and algebra have different domains')
    extra = [Operation(name, 2, algebra.size, t.reshape(-1))
             for name, t in zip(LOOP_OPS, (loop.mul, loop.ldiv, loop.rdiv))
             if name not in algebra.operations]
    return algebra.with_operations(extra, zero=loop.zero)


def loop_product(factors) -> Term:
    """``((f1*f2)*f3)...`` in the loop signature."""
    factors = list(factors)
    return reduce(lambda a, b: App('_mul', (a, b)), factors[1:], factors[0])


def loop_ldiv(a: Term, b: Term) -> Term:
    return App('_ldiv', (a, b))


def loop_rdiv(a: Term, b: Term) -> Term:
    return App('_rdiv', (a, b))


def zero_term(loop: LoopStructure) -> Term:
    return Const(loop.zero)
