"""Representation of a polynomial as a product of 0-absorbing pieces.

Given ``f(x_1..x_m)``, an enumeration ``a_1..a_N`` of the domain and a base
tuple ``b``, the factors are ``r_0 = f(0..0)`` and, for ``k = 0..m-1``::

    t_S   = (r_0(x_S) * ... * r_k(x_S)) \\ f(x_S)          for |S| = k+1
    r_k+1 = product of the t_S, grouped by the value t_S(b|S) in
            enumeration order, each group in lexicographic order of S

Each ``t_S`` is 0-absorbing and ``f(x_S) = r_0(x_S) * ... * r_|S|(x_S)``.
``t_S`` keeps the original variable names ``x_i, i in S``.  All products are
left-associated, and terms live in the loop signature ``_mul``, ``_ldiv``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra
from .loop import LoopStructure, loop_ldiv, loop_product, with_loop
from .terms import Const, Term, all_tuples, evaluate, evaluate_many, format_term, substitute

__all__ = ['Decomposition', 'VerificationReport', 'decompose', 'verify_decomposition',
           'DEFAULT_EXHAUSTIVE_LIMIT']

DEFAULT_EXHAUSTIVE_LIMIT = 10 ** 5


@dataclass
class Decomposition:
    f: Term
    m: int
    algebra: FiniteAlgebra                      # with loop operations
    loop: LoopStructure
    enumeration: tuple[int, ...]
    base: tuple[int, ...]
    factors: list[Term]                          # r_0 .. r_depth
    absorbing: dict[tuple[int, ...], Term]       # S (1-based, sorted) -> t_S
    values: dict[tuple[int, ...], int]           # S -> t_S(b|S)
    nu: int | None = None
    depth: int = 0

    @property
    def complete(self) -> bool:
        """True when the omitted factors ``r_k, k > depth`` are known to be trivial."""
        return self.depth >= self.m or (self.nu is not None and self.depth >= self.nu - 1)

    def product_term(self) -> Term:
        return loop_product(self.factors)

    def order(self, k: int) -> list[tuple[int, ...]]:
        """The sets ``S`` of size ``k`` in the order their ``t_S`` appear in ``r_k``."""
        rank = {a: i for i, a in enumerate(self.enumeration)}
        sets = [S for S in self.absorbing if len(S) == k]
        return sorted(sets, key=lambda S: (rank[self.values[S]], S))

    def describe(self, max_length: int = 400, full: bool = False) -> str:
        """The factors and nonzero ``t_S``; long terms are elided unless ``full``."""
        def show(t):
            if full or t.length <= max_length:
                return format_term(t)
            return f'<term of length {t.length}>'

        lines = [f'r_{i} = {show(r)}' for i, r in enumerate(self.factors)]
        zero = self.loop.zero
        for S in sorted(self.absorbing, key=lambda S: (len(S), S)):
            vals = _table(self.absorbing[S], self.algebra, S)
            if (vals != zero).any():
                name = 't_{' + ','.join(map(str, S)) + '}'
                lines.append(f'{name} = {show(self.absorbing[S])}   [t(b|S) = {self.values[S]}]')
        return '\n'.join(lines)


def _table(term, algebra, variables):
    return evaluate_many(term, algebra, all_tuples(algebra.size, len(variables)), variables)


def decompose(f: Term, algebra: FiniteAlgebra, loop: LoopStructure,
              enumeration: Sequence[int] | None = None, base: Sequence[int] | None = None,
              depth_cap: int | None = None, nu: int | None = None, m: int | None = None) -> Decomposition:
    """Run the recursion for ``f`` in variables ``x_1..x_m``.

    ``m`` defaults to the largest variable index of ``f``.  The recursion
    stops after ``r_depth`` with ``depth = depth_cap``, by default
    ``min(m, nu)`` when ``nu`` is known and ``m`` otherwise.
    """
    alg = with_loop(algebra, loop)
    n = alg.size
    zero = loop.zero
    if m is None:
        m = max(f.variables, default=0)
    if enumeration is None:
        enumeration = tuple(range(n))
    enumeration = tuple(int(a) for a in enumeration)
    if sorted(enumeration) != list(range(n)):
        raise AlgebraError('the enumeration must list every element exactly once')
    if base is None:
        base = (zero,) * m
    base = tuple(int(b) for b in base)
    if len(base) != m or any(not 0 <= b < n for b in base):
        raise AlgebraError(f'the base tuple needs {m} elements of the domain')
    if depth_cap is None:
        depth_cap = m if nu is None else min(m, nu)
    depth = min(depth_cap, m)
    rank = {a: i for i, a in enumerate(enumeration)}

    zero_const = Const(zero)
    factors = [Const(evaluate(f, alg, {i: zero for i in range(1, m + 1)}))]
    absorbing = {(): zero_const}
    values = {(): zero}
    for k in range(depth):
        level = []
        for S in itertools.combinations(range(1, m + 1), k + 1):
            outside = {i: zero_const for i in range(1, m + 1) if i not in S}
            prefix = loop_product([substitute(r, outside) for r in factors])
            t = loop_ldiv(prefix, substitute(f, outside))
            absorbing[S] = t
            values[S] = evaluate(t, alg, {i: base[i - 1] for i in S})
            level.append(S)
        level.sort(key=lambda S: (rank[values[S]], S))
        factors.append(loop_product([absorbing[S] for S in level]) if level else zero_const)
    return Decomposition(f, m, alg, loop, enumeration, base, factors, absorbing, values, nu, depth)


@dataclass
class VerificationReport:
    passed: bool
    exhaustive: bool
    seed: int | None
    checked: dict[str, int] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    def summary(self) -> str:
        mode = 'exhaustive' if self.exhaustive else f'sampled (seed {self.seed})'
        head = f'{"PASS" if self.passed else "FAIL"} [{mode}] ' + ', '.join(
            f'{k}: {v}' for k, v in self.checked.items())
        return '\n'.join([head, *(f'  {x["check"]}: {x["detail"]} at {x["point"]}' for x in self.failures)])


def _points(n, m, limit, samples, rng):
    if n ** m <= limit:
        return all_tuples(n, m), True
    return rng.integers(0, n, size=(samples, m)), False


def verify_decomposition(d: Decomposition, exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
                         samples: int = 1000, seed: int = 0, max_failures: int = 5) -> VerificationReport:
    """Check the product identity, absorption of every ``t_S`` and vanishing from ``r_nu`` on.

    All ``N**m`` tuples are used when that is at most ``exhaustive_limit``,
    else ``samples`` pseudorandom tuples from ``seed``.  Absorption is
    tested on tuples with at least one zero coordinate.
    """
    alg, loop, zero, n = d.algebra, d.loop, d.loop.zero, d.algebra.size
    rng = np.random.default_rng(seed)
    report = VerificationReport(True, True, None)

    def fail(check, detail, point):
        report.passed = False
        if len(report.failures) < max_failures:
            report.failures.append({'check': check, 'detail': detail, 'point': tuple(int(v) for v in point)})

    pts, exhaustive = _points(n, d.m, exhaustive_limit, samples, rng)
    if not exhaustive:
        report.exhaustive, report.seed = False, seed
    variables = range(1, d.m + 1)
    fvals = evaluate_many(d.f, alg, pts, variables).astype(np.int64)
    fac = [evaluate_many(r, alg, pts, variables).astype(np.int64) for r in d.factors]
    prod = fac[0]
    for v in fac[1:]:
        prod = loop.mul[prod, v]
    r0 = evaluate(d.f, alg, [zero] * d.m)
    if not (isinstance(d.factors[0], Const) and d.factors[0].value == r0):
        fail('r_0', f'r_0 is not the constant f(0..0) = {r0}', (zero,) * d.m)
    if d.complete:
        bad = np.flatnonzero(prod != fvals)
        for i in bad[:max_failures]:
            fail('product', f'f = {fvals[i]} but the product is {prod[i]}', pts[i])
        if len(bad):
            report.passed = False
        report.checked['product'] = len(pts)

    checked = 0
    for S, t in sorted(d.absorbing.items(), key=lambda kv: (len(kv[0]), kv[0])):
        if not S:
            continue
        tp, ex = _points(n, len(S), exhaustive_limit, samples, rng)
        if not ex:
            report.exhaustive, report.seed = False, seed
            # force a zero somewhere in every sampled tuple
            tp[np.arange(len(tp)), rng.integers(0, len(S), len(tp))] = zero
        tp = tp[(tp == zero).any(axis=1)]
        vals = evaluate_many(t, alg, tp, S)
        bad = np.flatnonzero(vals != zero)
        for i in bad[:max_failures]:
            fail('absorbing', f't_{set(S)} = {vals[i]} on a tuple with a zero', tp[i])
        checked += len(tp)
    report.checked['absorbing'] = checked

    if d.nu is not None:
        count = 0
        for k in range(d.nu, len(d.factors)):
            bad = np.flatnonzero(fac[k] != zero)
            for i in bad[:max_failures]:
                fail('vanishing', f'r_{k} = {fac[k][i]} although k >= nu = {d.nu}', pts[i])
            count += len(pts)
        report.checked['vanishing'] = count
    return report
