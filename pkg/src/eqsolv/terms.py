"""Polynomials over a finite algebra: syntax trees, parsing, printing, evaluation.

Grammar (whitespace is insignificant)::

    term  := var | const | name '(' [term (',' term)*] ')'
    var   := 'x' [1-9][0-9]*
    const := '#' [0-9]+

The empty argument list ``name()`` applies a nullary operation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra, element_dtype

__all__ = [
    'Term', 'Var', 'Const', 'App',
    'TermError', 'TermSyntaxError', 'UnknownOperationError', 'ArityError', 'UnassignedVariableError',
    'parse_term', 'format_term', 'check_term',
    'evaluate', 'evaluate_many', 'eval_support', 'mask_support', 'function_table', 'all_tuples',
    'substitute', 'random_term',
]


class TermError(AlgebraError):
    pass


class TermSyntaxError(TermError):
    def __init__(self, message, position):
        super().__init__(f'{message} at position {position}')
        self.position = position


class UnknownOperationError(TermError):
    pass


class ArityError(TermError):
    pass


class UnassignedVariableError(TermError, KeyError):
    def __str__(self):
        return self.args[0]


class Term:
    """Base class of the three node kinds.  Nodes are immutable and may be shared."""

    __slots__ = ()

    @cached_property
    def length(self) -> int:
        """Number of operation, constant and variable symbols."""
        raise NotImplementedError

    @cached_property
    def variables(self) -> tuple[int, ...]:
        raise NotImplementedError

    def __str__(self):
        return format_term(self)


@dataclass(frozen=True)
class Var(Term):
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise TermError(f'variable index must be positive, got {self.index}')

    @cached_property
    def length(self):
        return 1

    @cached_property
    def variables(self):
        return (self.index,)


@dataclass(frozen=True)
class Const(Term):
    value: int

    @cached_property
    def length(self):
        return 1

    @cached_property
    def variables(self):
        return ()


@dataclass(frozen=True)
class App(Term):
    op: str
    args: tuple[Term, ...] = ()

    @cached_property
    def length(self):
        return 1 + sum(a.length for a in self.args)

    @cached_property
    def variables(self):
        return tuple(sorted(set().union(*(a.variables for a in self.args))))


# parsing

_TOKEN = re.compile(r'\s*(?:(?P<const>#[0-9]+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*(?:@[0-9]+)?)|(?P<punct>[(),]))')
_VAR = re.compile(r'x[1-9][0-9]*')


def _tokenize(source):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(source, pos)
        if m is None:
            rest = source[pos:]
            if rest.strip():
                start = pos + len(rest) - len(rest.lstrip())
                raise TermSyntaxError(f'unexpected character {source[start]!r}', start)
            out.append(('end', None, len(source)))
            return out
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()


def parse_term(source: str, algebra: FiniteAlgebra | None = None) -> Term:
    """Parse ``source``; when ``algebra`` is given, resolve names and check arities and constants."""
    toks = _tokenize(source)
    pos = 0

    def peek():
        return toks[pos]

    def expect(value):
        nonlocal pos
        kind, text, at = toks[pos]
        if text != value:
            where = 'end of input' if kind == 'end' else repr(text)
            raise TermSyntaxError(f'expected {value!r}, got {where}', at)
        pos += 1

    def term():
        nonlocal pos
        kind, text, at = toks[pos]
        if kind == 'const':
            pos += 1
            return Const(int(text[1:]))
        if kind == 'name':
            pos += 1
            if _VAR.fullmatch(text) and peek()[1] != '(':
                return Var(int(text[1:]))
            expect('(')
            args = []
            if peek()[1] != ')':
                args.append(term())
                while peek()[1] == ',':
                    pos += 1
                    args.append(term())
            expect(')')
            return App(text, tuple(args))
        where = 'end of input' if kind == 'end' else repr(text)
        raise TermSyntaxError(f'expected a term, got {where}', at)

    result = term()
    kind, text, at = peek()
    if kind != 'end':
        raise TermSyntaxError(f'trailing input {text!r}', at)
    if algebra is not None:
        check_term(result, algebra)
    return result


def check_term(term: Term, algebra: FiniteAlgebra) -> None:
    seen = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if id(t) in seen:
            continue
        seen.add(id(t))
        if isinstance(t, Const):
            if not 0 <= t.value < algebra.size:
                raise TermError(f'constant #{t.value} out of range 0..{algebra.size - 1}')
        elif isinstance(t, App):
            try:
                op = algebra.operation(t.op)
            except KeyError:
                raise UnknownOperationError(f'unknown operation {t.op!r}') from None
            if op.arity != len(t.args):
                raise ArityError(f'{t.op} has arity {op.arity}, applied to {len(t.args)} arguments')
            stack.extend(t.args)


def format_term(term: Term) -> str:
    if isinstance(term, Var):
        return f'x{term.index}'
    if isinstance(term, Const):
        return f'#{term.value}'
    return f'{term.op}(' + ', '.join(format_term(a) for a in term.args) + ')'


# evaluation

def _lookup(assignment, index):
    try:
        return assignment[index] if isinstance(assignment, Mapping) else assignment[index - 1]
    except (KeyError, IndexError):
        raise UnassignedVariableError(f'variable x{index} is not assigned') from None


def evaluate(term: Term, algebra: FiniteAlgebra, assignment) -> int:
    """Value of ``term`` under ``assignment``.

    ``assignment`` maps variable indices to elements, or is a sequence whose
    entry ``i-1`` is the value of ``x_i``.
    """
    memo = {}

    def ev(t):
        key = id(t)
        if key in memo:
            return memo[key]
        if isinstance(t, Var):
            v = int(_lookup(assignment, t.index))
            if not 0 <= v < algebra.size:
                raise TermError(f'value {v} of x{t.index} out of range')
        elif isinstance(t, Const):
            v = t.value
            if not 0 <= v < algebra.size:
                raise TermError(f'constant #{v} out of range')
        else:
            op = algebra.operation(t.op)
            v = int(op(*[ev(a) for a in t.args]))
        memo[key] = v
        return v

    return ev(term)


def evaluate_many(term: Term, algebra: FiniteAlgebra, values, variables: Sequence[int] | None = None) -> np.ndarray:
    """Evaluate on a batch: column ``j`` of ``values`` holds ``x_{variables[j]}``.

    ``variables`` defaults to ``1..values.shape[1]``.  Shared subterms are
    evaluated once.
    """
    values = np.asarray(values)
    if values.ndim != 2:
        raise TermError('values must be a 2-d array (batch, variables)')
    batch = values.shape[0]
    if variables is None:
        variables = range(1, values.shape[1] + 1)
    column = {v: j for j, v in enumerate(variables)}
    dtype = element_dtype(algebra.size)
    memo = {}

    def ev(t):
        key = id(t)
        if key in memo:
            return memo[key]
        if isinstance(t, Var):
            if t.index not in column:
                raise UnassignedVariableError(f'variable x{t.index} is not assigned')
            r = values[:, column[t.index]]
        elif isinstance(t, Const):
            r = np.full(batch, t.value, dtype=dtype)
        else:
            op = algebra.operation(t.op)
            r = op(*[ev(a) for a in t.args])
            r = np.broadcast_to(np.asarray(r, dtype=dtype), (batch,))
        memo[key] = r
        return r

    return np.array(ev(term), dtype=dtype)


def all_tuples(size: int, m: int) -> np.ndarray:
    """All of ``range(size)**m`` in odometer order (last coordinate fastest)."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((size,) * m).reshape(m, -1).T.copy()


def function_table(term: Term, algebra: FiniteAlgebra, variables: Sequence[int] | None = None) -> np.ndarray:
    """Flat row-major table of the function induced on ``variables`` (default: the term's own)."""
    if variables is None:
        variables = term.variables
    return evaluate_many(term, algebra, all_tuples(algebra.size, len(variables)), variables)


def mask_support(values: Sequence[int], support, zero: int) -> list[int]:
    """``b_S``: keep the positions (1-based) in ``support``, put ``zero`` elsewhere."""
    support = set(support)
    return [v if i in support else zero for i, v in enumerate(values, 1)]


def eval_support(term: Term, algebra: FiniteAlgebra, base, support) -> int:
    """``term`` evaluated at ``base`` with the coordinates outside ``support`` set to the zero."""
    if algebra.zero is None:
        raise TermError('the algebra has no designated zero')
    if isinstance(base, Mapping):
        support = set(support)
        masked = {i: (v if i in support else algebra.zero) for i, v in base.items()}
    else:
        masked = mask_support(base, support, algebra.zero)
    return evaluate(term, algebra, masked)


def substitute(term: Term, mapping: Mapping[int, Term]) -> Term:
    """Replace variables by terms; shared subterms stay shared."""
    memo = {}

    def sub(t):
        key = id(t)
        if key in memo:
            return memo[key]
        if isinstance(t, Var):
            r = mapping.get(t.index, t)
        elif isinstance(t, Const):
            r = t
        elif not set(t.variables) & mapping.keys():
            r = t
        else:
            r = App(t.op, tuple(sub(a) for a in t.args))
        memo[key] = r
        return r

    return sub(term)


def random_term(algebra: FiniteAlgebra, rng: np.random.Generator, n_vars: int, max_length: int,
                operations: Sequence[str] | None = None, const_prob: float = 0.15,
                leaf_prob: float = 0.3) -> Term:
    """A random polynomial in ``x_1..x_n_vars`` of length at most ``max_length``."""
    if operations is None:
        operations = list(algebra.operations)
    ops = [algebra.operation(name) for name in operations]
    ops = [op for op in ops if op.arity > 0] or ops

    def leaf():
        if rng.random() < const_prob:
            return Const(int(rng.integers(algebra.size)))
        return Var(int(rng.integers(1, n_vars + 1)))

    def gen(budget):
        fitting = [op for op in ops if op.arity + 1 <= budget]
        if not fitting or rng.random() < leaf_prob:
            return leaf()
        op = fitting[int(rng.integers(len(fitting)))]
        rest = budget - 1
        # split the remaining budget, at least one symbol per argument
        cuts = np.sort(rng.choice(np.arange(1, rest), size=op.arity - 1, replace=False)) \
            if op.arity > 1 else np.array([], dtype=int)
        bounds = [0, *cuts.tolist(), rest]
        return App(op.name, tuple(gen(bounds[i + 1] - bounds[i]) for i in range(op.arity)))

    return gen(max_length)

