import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqsolv.algebra import FiniteAlgebra, Operation, cyclic_group, dihedral_group, semilattice, trivial_algebra
from eqsolv.loop import (LoopError, derive_loop, find_malcev, left_power, verify_malcev, with_loop)
from eqsolv.terms import Var, all_tuples, evaluate_many, parse_term

from conftest import MALCEV


def test_verify_examples(z4, z9):
    assert verify_malcev(z4, MALCEV).ok
    assert verify_malcev(z9, MALCEV).ok
    bad = verify_malcev(z4, Var(1))
    assert not bad and bad.counterexample == (0, 1) and bad.value == 0
    assert bad.describe() == 'm(0, 0, 1) = 0 != 1'


def test_verify_reports_second_identity(z4):
    bad = verify_malcev(z4, Var(3))
    assert bad.identity == 'm(y,x,x)=y' and bad.counterexample == (0, 1)


def test_find_malcev_z4(z4):
    res = find_malcev(z4)
    assert res.term is not None and res.saturated
    grid = all_tuples(4, 3)
    vals = evaluate_many(res.term, z4, grid, (1, 2, 3))
    assert np.array_equal(vals, (grid[:, 0] - grid[:, 1] + grid[:, 2]) % 4)


def test_find_malcev_none_for_semilattice():
    res = find_malcev(semilattice(2))
    assert res.term is None and res.saturated


def test_find_malcev_trivial():
    res = find_malcev(trivial_algebra())
    assert res.term is not None and verify_malcev(trivial_algebra(), res.term)


def test_find_malcev_d8(d8):
    res = find_malcev(d8)
    assert verify_malcev(d8, res.term)


def test_loop_examples(z4_loop, z9_loop):
    a = np.arange(4)
    assert np.array_equal(z4_loop.mul, (a[:, None] + a[None, :]) % 4)
    assert np.array_equal(z4_loop.ldiv, (a[None, :] - a[:, None]) % 4)
    assert np.array_equal(z4_loop.rdiv, (a[:, None] - a[None, :]) % 4)   # rdiv[y, x] = y - x
    assert z4_loop.exponent == 4
    b = np.arange(9)
    assert np.array_equal(z9_loop.mul, (b[:, None] + b[None, :]) % 9)
    assert z9_loop.exponent == 9
    t = derive_loop(trivial_algebra(), find_malcev(trivial_algebra()).term)
    assert t.exponent == 1 and t.mul.tolist() == [[0]]


def test_left_power(z4_loop, z9_loop):
    assert left_power(z4_loop, 1, 4) == 0
    assert left_power(z9_loop, 3, 3) == 0
    for x in range(9):
        assert left_power(z9_loop, x, 1) == x
        assert left_power(z9_loop, x, z9_loop.exponent) == 0
    with pytest.raises(ValueError):
        left_power(z4_loop, 1, 0)


def test_nonabelian_loop_axioms(d8):
    loop = derive_loop(d8, find_malcev(d8).term)
    assert loop.axioms_hold()
    assert loop.exponent == 4
    # x*y = x 0^-1 y is the group product
    mul = d8.operation('mul').full_table().reshape(8, 8)
    assert np.array_equal(loop.mul, mul)


def test_derive_rejects_non_malcev(z4):
    with pytest.raises(LoopError, match='not a Mal'):
        derive_loop(z4, 'x1')


def test_derive_rejects_non_latin():
    # Mal'cev on {0,1,2}, but m(1,0,y) = 1 for every y
    n = 3
    table = [c if a == b else a for a, b, c in itertools.product(range(n), repeat=3)]
    A = FiniteAlgebra(n, [Operation('m', 3, n, np.array(table))], zero=0)
    assert verify_malcev(A, 'm(x1,x2,x3)')
    with pytest.raises(LoopError, match='Latin'):
        derive_loop(A, 'm(x1,x2,x3)')


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 11))
def test_cyclic_loop_properties(n, zero):
    zero %= n
    A = cyclic_group(n)
    loop = derive_loop(A, MALCEV, zero=zero)
    assert loop.axioms_hold()
    assert loop.exponent == n
    for x in range(n):
        assert left_power(loop, x, loop.exponent) == zero
    ext = with_loop(A, loop)
    assert {'_mul', '_ldiv', '_rdiv'} <= set(ext.operations)


def test_with_loop_terms(z4l):
    t = parse_term('_rdiv(x1, x2)', z4l)
    grid = all_tuples(4, 2)
    assert np.array_equal(evaluate_many(t, z4l, grid, (1, 2)), (grid[:, 0] - grid[:, 1]) % 4)
