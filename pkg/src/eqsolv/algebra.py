"""Finite algebras given by operation tables, and the ``.alg`` file format.

Elements of an algebra of size ``N`` are the integers ``0..N-1``.  Every
operation table is stored flat in row-major order (the last argument varies
fastest), so the value of ``f(a_1, ..., a_r)`` sits at index
``a_1*N**(r-1) + ... + a_r``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    'AlgebraError', 'AlgebraFileError',
    'Operation', 'FiniteAlgebra',
    'cyclic_group', 'dihedral_group', 'semilattice', 'trivial_algebra',
    'parse_algebra', 'load_algebra', 'format_algebra',
    'DEFAULT_TABLE_BUDGET', 'OP_NAME',
]

DEFAULT_TABLE_BUDGET = 2 ** 26

# operation names; an optional "@n" suffix names one member of a family
OP_NAME = re.compile(r'[A-Za-z_][A-Za-z0-9_]*(?:@[0-9]+)?')
_VARIABLE = re.compile(r'x[1-9][0-9]*')


class AlgebraError(ValueError):
    pass


class AlgebraFileError(AlgebraError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)
        self.line = line


def element_dtype(size: int):
    return np.uint8 if size <= 256 else np.int32


@dataclass(frozen=True, eq=False)
class Operation:
    """A named operation of fixed arity on ``range(size)``.

    Explicit operations carry a flat ``table``.  Members of an operation
    family that are too large to tabulate carry a vectorized ``func`` instead.
    """

    name: str
    arity: int
    size: int
    table: np.ndarray | None = None
    func: Callable[..., np.ndarray] | None = None

    def __post_init__(self):
        if (self.table is None) == (self.func is None):
            raise AlgebraError(f'operation {self.name}: need exactly one of table or func')
        if self.table is not None:
            table = np.ascontiguousarray(self.table, dtype=element_dtype(self.size)).reshape(-1)
            if table.size != self.size ** self.arity:
                raise AlgebraError(
                    f'operation {self.name}: table has {table.size} entries, '
                    f'expected {self.size}**{self.arity} = {self.size ** self.arity}')
            if table.size and int(table.max()) >= self.size:
                raise AlgebraError(f'operation {self.name}: table value out of range')
            table.setflags(write=False)
            object.__setattr__(self, 'table', table)

    def __call__(self, *args):
        """Apply pointwise to integers or broadcastable integer arrays."""
        if len(args) != self.arity:
            raise AlgebraError(f'{self.name} expects {self.arity} arguments, got {len(args)}')
        if self.func is not None:
            return self.func(*args)
        if self.arity == 0:
            return self.table[0]
        index = np.asarray(args[0], dtype=np.int64)
        for a in args[1:]:
            index = index * self.size + np.asarray(a, dtype=np.int64)
        return self.table[index]

    def full_table(self) -> np.ndarray:
        if self.table is not None:
            return self.table
        grid = np.indices((self.size,) * self.arity).reshape(self.arity, -1)
        return np.asarray(self.func(*grid), dtype=element_dtype(self.size))

    def __repr__(self):
        kind = 'table' if self.table is not None else 'func'
        return f'Operation({self.name!r}, arity={self.arity}, {kind})'


class FiniteAlgebra:
    """A finite algebra ``(range(size), operations)`` with an optional zero.

    ``template`` supplies operations of an infinite family on demand: it is
    any object with methods ``operation(name) -> Operation | None`` and
    ``instances(max_arity) -> list[Operation]``, and a ``kind`` attribute
    naming it in algebra files.  An optional ``closure_arity(n)`` tells how
    many family members suffice to generate all ``n``-ary polynomials.
    """

    def __init__(self, size: int, operations: Iterable[Operation] = (), zero: int | None = None,
                 template=None, name: str | None = None, element_names: Sequence[str] | None = None):
        if size < 1:
            raise AlgebraError('domain size must be positive')
        self.size = size
        self.zero = zero
        self.template = template
        self.name = name
        self.element_names = tuple(element_names) if element_names else None
        self.operations: dict[str, Operation] = {}
        for op in operations:
            if op.name in self.operations:
                raise AlgebraError(f'duplicate operation name {op.name}')
            if not OP_NAME.fullmatch(op.name) or _VARIABLE.fullmatch(op.name):
                raise AlgebraError(f'invalid operation name {op.name!r}')
            if op.size != size:
                raise AlgebraError(f'operation {op.name} is over a domain of size {op.size}')
            self.operations[op.name] = op
        if zero is not None and not 0 <= zero < size:
            raise AlgebraError(f'designated zero {zero} out of range')
        self._instances: dict[str, Operation] = {}

    def operation(self, name: str) -> Operation:
        try:
            return self.operations[name]
        except KeyError:
            pass
        if name in self._instances:
            return self._instances[name]
        op = self.template.operation(name) if self.template is not None else None
        if op is None:
            raise KeyError(name)
        self._instances[name] = op
        return op

    def operations_up_to(self, max_arity: int) -> list[Operation]:
        """Basic operations plus the template family members of arity <= ``max_arity``."""
        ops = list(self.operations.values())
        if self.template is not None:
            for op in self.template.instances(max_arity):
                if op.name not in self.operations:
                    ops.append(self._instances.setdefault(op.name, op))
        return ops

    def clone_operations(self, n: int) -> tuple[list[Operation], bool]:
        """Operations generating ``Pol_n`` and whether that set is known to be complete."""
        if self.template is None:
            return list(self.operations.values()), True
        bound = getattr(self.template, 'closure_arity', None)
        if bound is None:
            return self.operations_up_to(max(n, 1)), False
        return self.operations_up_to(bound(n)), True

    def has_operation(self, name: str) -> bool:
        try:
            self.operation(name)
        except KeyError:
            return False
        return True

    def with_operations(self, extra: Iterable[Operation], zero: int | None = None) -> 'FiniteAlgebra':
        return FiniteAlgebra(self.size, [*self.operations.values(), *extra],
                             zero=self.zero if zero is None else zero,
                             template=self.template, name=self.name,
                             element_names=self.element_names)

    def reduct(self, names: Iterable[str]) -> 'FiniteAlgebra':
        names = set(names)
        return FiniteAlgebra(self.size, [op for op in self.operations.values() if op.name in names],
                             zero=self.zero, name=self.name, element_names=self.element_names)

    @property
    def elements(self) -> range:
        return range(self.size)

    def __repr__(self):
        ops = ', '.join(f'{op.name}/{op.arity}' for op in self.operations.values())
        extra = f', zero={self.zero}' if self.zero is not None else ''
        if self.template is not None:
            extra += f', template={self.template!r}'
        return f'FiniteAlgebra(N={self.size}, [{ops}]{extra})'


# small builders used by fixtures and demos

def _table(size, arity, fn):
    grid = np.indices((size,) * arity).reshape(arity, -1)
    return np.asarray(fn(*grid), dtype=np.int64) % size


def cyclic_group(n: int, zero_op: bool = True) -> FiniteAlgebra:
    """``(Z_n, plus, neg, zero)`` with designated zero 0."""
    ops = [Operation('plus', 2, n, _table(n, 2, lambda x, y: x + y)),
           Operation('neg', 1, n, _table(n, 1, lambda x: -x))]
    if zero_op:
        ops.append(Operation('zero', 0, n, np.zeros(1, dtype=np.int64)))
    return FiniteAlgebra(n, ops, zero=0, name=f'Z{n}')


def dihedral_group(k: int) -> FiniteAlgebra:
    """The dihedral group of order ``2k``; element ``i + k*j`` is ``r^i s^j``."""
    n = 2 * k

    def split(a):
        return a % k, a // k

    def mul(a, b):
        i, j = split(a)
        i2, j2 = split(b)
        # s r^i = r^-i s
        rot = np.where(j == 0, i + i2, i - i2) % k
        return rot + k * ((j + j2) % 2)

    def inv(a):
        i, j = split(a)
        return np.where(j == 0, (-i) % k, i) + k * j

    ops = [Operation('mul', 2, n, _table(n, 2, mul)),
           Operation('inv', 1, n, _table(n, 1, inv)),
           Operation('e', 0, n, np.zeros(1, dtype=np.int64))]
    return FiniteAlgebra(n, ops, zero=0, name=f'D{n}')


def semilattice(n: int = 2) -> FiniteAlgebra:
    return FiniteAlgebra(n, [Operation('meet', 2, n, _table(n, 2, np.minimum))], zero=0,
                         name=f'SL{n}')


def trivial_algebra() -> FiniteAlgebra:
    return FiniteAlgebra(1, [Operation('plus', 2, 1, np.zeros(1, dtype=np.int64))], zero=0,
                         name='trivial')


# .alg files

def _tokens(text):
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split('%', 1)[0]
        for tok in line.split():
            yield lineno, tok


def parse_algebra(text: str, max_entries: int = DEFAULT_TABLE_BUDGET, name: str | None = None) -> FiniteAlgebra:
    """Parse the text of an algebra file.

    Format: ``domain N``, optionally ``elements NAME...`` (aliases usable in
    tables), ``zero K``, ``template KIND``, then ``op NAME ARITY`` blocks each
    followed by ``N**ARITY`` values in row-major order.  ``%`` starts a comment.
    """
    toks = list(_tokens(text))
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(toks):
            raise AlgebraFileError(f'unexpected end of file, expected {what}')
        tok = toks[pos]
        pos += 1
        return tok

    def take_int(what):
        line, tok = take(what)
        try:
            return int(tok), line
        except ValueError:
            raise AlgebraFileError(f'expected {what}, got {tok!r}', line) from None

    line, kw = take('"domain"')
    if kw != 'domain':
        raise AlgebraFileError(f'file must start with "domain N", got {kw!r}', line)
    size, line = take_int('domain size')
    if size < 1:
        raise AlgebraFileError('domain size must be positive', line)

    aliases: dict[str, int] = {}
    element_names = None
    zero = None
    template_kind = None
    ops = []

    def element(tok, line):
        if tok in aliases:
            return aliases[tok]
        try:
            v = int(tok)
        except ValueError:
            raise AlgebraFileError(f'unknown element {tok!r}', line) from None
        if not 0 <= v < size:
            raise AlgebraFileError(f'element {v} out of range 0..{size - 1}', line)
        return v

    while pos < len(toks):
        line, kw = take('keyword')
        if kw == 'elements':
            element_names = [take('element name')[1] for _ in range(size)]
            aliases = {n: i for i, n in enumerate(element_names)}
            if len(aliases) != size:
                raise AlgebraFileError('element names must be distinct', line)
        elif kw == 'zero':
            line, tok = take('zero element')
            zero = element(tok, line)
        elif kw == 'template':
            template_kind = take('template kind')[1]
        elif kw == 'op':
            line, opname = take('operation name')
            arity, _ = take_int('arity')
            if arity < 0:
                raise AlgebraFileError('negative arity', line)
            count = size ** arity
            if count > max_entries:
                raise AlgebraFileError(
                    f'operation {opname}: {count} table entries exceed the budget of {max_entries}', line)
            values = []
            for _ in range(count):
                vline, tok = take(f'table value for {opname}')
                values.append(element(tok, vline))
            try:
                ops.append(Operation(opname, arity, size, np.array(values, dtype=np.int64)))
            except AlgebraError as exc:
                raise AlgebraFileError(str(exc), line) from None
        else:
            raise AlgebraFileError(f'unknown keyword {kw!r}', line)

    template = None
    if template_kind is not None:
        if template_kind != 'ap':
            raise AlgebraFileError(f'unknown template {template_kind!r}')
        from .hardness import ApTemplate
        template = ApTemplate.for_domain(size)
    try:
        return FiniteAlgebra(size, ops, zero=zero, template=template, name=name,
                             element_names=element_names)
    except AlgebraError as exc:
        raise AlgebraFileError(str(exc)) from None


def load_algebra(path, max_entries: int = DEFAULT_TABLE_BUDGET) -> FiniteAlgebra:
    path = Path(path)
    return parse_algebra(path.read_text(encoding='utf-8'), max_entries=max_entries, name=path.stem)


def format_algebra(algebra: FiniteAlgebra) -> str:
    lines = [f'domain {algebra.size}']
    if algebra.zero is not None:
        lines.append(f'zero {algebra.zero}')
    if algebra.template is not None:
        lines.append(f'template {algebra.template.kind}')
    n = algebra.size
    for op in algebra.operations.values():
        lines.append(f'op {op.name} {op.arity}')
        table = op.full_table()
        width = n if op.arity else 1
        for i in range(0, table.size, width):
            lines.append(' '.join(str(int(v)) for v in table[i:i + width]))
    return '\n'.join(lines) + '\n'
