"""The algebras ``A_p`` and the graph colouring reduction.

``A_p`` is ``Z_{p^2}`` with ``+``, ``-``, ``0`` and one operation
``f_n(x_1..x_n) = p * x_1 * ... * x_n`` for every arity ``n``, written
``f@n`` in terms.  A graph ``G`` is ``p``-colourable iff ``t_G = p`` has a
solution, where ``t_G`` multiplies ``p - 1`` copies of ``x_u - x_v`` for
every edge.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .algebra import AlgebraError, AlgebraFileError, FiniteAlgebra, Operation, cyclic_group
from .terms import App, Term, Var, evaluate

__all__ = [
    'ApTemplate', 'build_ap', 'is_prime', 'GraphInstance', 'parse_graph', 'load_graph', 'format_graph',
    'reduce_graph', 'coloring_from_witness', 'witness_from_coloring', 'is_proper', 'p_colorable',
    'complete_graph', 'cycle_graph', 'all_graphs', 'DEFAULT_COLORING_BUDGET',
]

DEFAULT_COLORING_BUDGET = 10 ** 7
_FAMILY = re.compile(r'f@([0-9]+)')


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


class ApTemplate:
    """The family ``f@n`` on ``Z_{p^2}``, evaluated as a running product."""

    kind = 'ap'

    def __init__(self, p: int):
        if not is_prime(p):
            raise AlgebraError(f'p = {p} is not prime')
        self.p = p
        self.size = p * p

    @classmethod
    def for_domain(cls, size: int) -> 'ApTemplate':
        p = round(size ** 0.5)
        if p * p != size or not is_prime(p):
            raise AlgebraError(f'template ap needs a domain of size p**2 for a prime p, got {size}')
        return cls(p)

    def operation(self, name: str) -> Operation | None:
        m = _FAMILY.fullmatch(name)
        if m is None:
            return None
        n = int(m.group(1))
        q, p = self.size, self.p

        def f(*args):
            acc = np.asarray(p, dtype=np.int64)
            for a in args:
                acc = acc * np.asarray(a, dtype=np.int64) % q
            return acc

        return Operation(name, n, q, func=f)

    def closure_arity(self, n: int) -> int:
        """Family members up to this arity already give every ``n``-ary polynomial.

        ``f@j`` only sees its arguments mod ``p``, where every polynomial
        function of ``n`` variables has degree at most ``n (p-1)``, so
        ``p`` times it is a sum of ``f@i`` on projections, ``i <= n (p-1)``.
        """
        return max(1, n * (self.p - 1))

    def instances(self, max_arity: int) -> list[Operation]:
        return [self.operation(f'f@{n}') for n in range(1, max_arity + 1)]

    def __repr__(self):
        return f'ApTemplate(p={self.p})'


def build_ap(p: int) -> FiniteAlgebra:
    """``A_p``: the group ``Z_{p^2}`` with the template family ``f@n``."""
    base = cyclic_group(p * p)
    return FiniteAlgebra(base.size, base.operations.values(), zero=0, template=ApTemplate(p),
                         name=f'A{p}')


@dataclass(frozen=True)
class GraphInstance:
    """A simple graph on vertices ``0..vertices-1``; edges are sorted pairs, sorted."""

    vertices: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, vertices: int, edges: Sequence[Sequence[int]] = ()):
        if vertices < 0:
            raise ValueError('negative vertex count')
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f'self-loop at vertex {u}')
            if not (0 <= u < vertices and 0 <= v < vertices):
                raise ValueError(f'edge ({u}, {v}) out of range')
            canon.add((min(u, v), max(u, v)))
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'edges', tuple(sorted(canon)))


def complete_graph(n: int) -> GraphInstance:
    return GraphInstance(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> GraphInstance:
    return GraphInstance(n, [(i, (i + 1) % n) for i in range(n)])


def all_graphs(n: int):
    """Every graph on ``n`` labelled vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(2 ** len(pairs)):
        yield GraphInstance(n, [e for i, e in enumerate(pairs) if mask >> i & 1])


def parse_graph(text: str) -> GraphInstance:
    """``vertices N`` then ``edge u v`` lines (0-based); ``%`` or ``#`` start comments."""
    n = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = re.split(r'[%#]', line, maxsplit=1)[0].split()
        if not line:
            continue
        try:
            if line[0] == 'vertices' and len(line) == 2 and n is None:
                n = int(line[1])
            elif line[0] == 'edge' and len(line) == 3 and n is not None:
                edges.append((int(line[1]), int(line[2])))
            else:
                raise AlgebraFileError(f'unexpected line {" ".join(line)!r}', lineno)
        except ValueError as exc:
            if isinstance(exc, AlgebraFileError):
                raise
            raise AlgebraFileError(f'bad number in {" ".join(line)!r}', lineno) from None
    if n is None:
        raise AlgebraFileError('missing "vertices N" line')
    try:
        return GraphInstance(n, edges)
    except ValueError as exc:
        raise AlgebraFileError(str(exc)) from None


def load_graph(path) -> GraphInstance:
    return parse_graph(Path(path).read_text(encoding='utf-8'))


def format_graph(g: GraphInstance) -> str:
    return '\n'.join([f'vertices {g.vertices}', *(f'edge {u} {v}' for u, v in g.edges)]) + '\n'


def reduce_graph(g: GraphInstance, p: int) -> Term:
    """``t_G = f@((p-1)|E|)`` applied to ``p-1`` copies of ``x_{u+1} - x_{v+1}`` per edge."""
    if not is_prime(p):
        raise AlgebraError(f'p = {p} is not prime')
    if p == 2:
        raise AlgebraError('the reduction needs an odd prime')
    if not g.edges:
        raise AlgebraError('the reduction needs at least one edge')
    args = []
    for u, v in g.edges:
        diff = App('plus', (Var(u + 1), App('neg', (Var(v + 1),))))
        args.extend([diff] * (p - 1))
    return App(f'f@{len(args)}', tuple(args))


def coloring_from_witness(witness: Sequence[int], p: int) -> tuple[int, ...]:
    return tuple(int(w) % p for w in witness)


def witness_from_coloring(coloring: Sequence[int], p: int) -> tuple[int, ...]:
    """Colour ``c`` goes to the element ``c``, a representative of the coset ``c + pZ``."""
    colors = sorted(set(int(c) for c in coloring))
    if len(colors) > p or (colors and (colors[0] < 0 or colors[-1] >= p)):
        raise ValueError(f'a witness needs colours in 0..{p - 1}')
    return tuple(int(c) for c in coloring)


def is_proper(g: GraphInstance, coloring: Sequence[int]) -> bool:
    return all(coloring[u] != coloring[v] for u, v in g.edges)


def p_colorable(g: GraphInstance, p: int, budget: int = DEFAULT_COLORING_BUDGET) -> bool:
    """Exact, by trying all ``p**|V|`` colourings."""
    if p ** g.vertices > budget:
        raise AlgebraError(f'{p}**{g.vertices} colourings exceed the budget of {budget}')
    if not g.edges:
        return True
    cols = np.indices((p,) * g.vertices).reshape(g.vertices, -1)
    ok = np.ones(cols.shape[1], dtype=bool)
    for u, v in g.edges:
        ok &= cols[u] != cols[v]
    return bool(ok.any())


def evaluate_reduction(g: GraphInstance, p: int, witness: Sequence[int]) -> int:
    return evaluate(reduce_graph(g, p), build_ap(p), list(witness))
