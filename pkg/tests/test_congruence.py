import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqsolv.algebra import FiniteAlgebra, Operation, cyclic_group, semilattice, trivial_algebra
from eqsolv.congruence import (CommutatorBudgetError, NoMalcevWarning, Partition, TemplateTruncationWarning,
                               absorbing_polynomials, clone_closure,
                               check_supernilpotency, commutator, congruence_generated, congruence_lattice,
                               cube_vanishing_order, find_absorbing_witness, nilpotency_degree,
                               supernilpotency_degree_absorbing)
from eqsolv.terms import all_tuples


def klein():
    t = np.array([[a ^ b for b in range(4)] for a in range(4)])
    return FiniteAlgebra(4, [Operation('plus', 2, 4, t), Operation('neg', 1, 4, np.arange(4))], zero=0)


def one(A):
    return Partition.total(A.size)


def zero(A):
    return Partition.identity(A.size)


def test_partition_basics():
    p = Partition.from_classes(5, [[3, 1], [4, 0]])
    assert p.rep.tolist() == [0, 1, 2, 1, 0]
    assert p.classes() == [[0, 4], [1, 3], [2]]
    assert Partition.identity(5) <= p <= Partition.total(5)
    assert p.meet(Partition.from_classes(5, [[0, 1, 2]])).classes() == [[0], [1], [2], [3], [4]]
    assert p.join(Partition.from_classes(5, [[2, 3]])).classes() == [[0, 4], [1, 2, 3]]
    with pytest.raises(ValueError):
        Partition([1, 0])


def test_cg_examples(z4):
    assert congruence_generated(z4, [(0, 2)]).classes() == [[0, 2], [1, 3]]
    assert congruence_generated(z4, []) == zero(z4)
    assert congruence_generated(z4, [(0, 1)]) == one(z4)


def test_commutator_examples(z4, z9):
    assert commutator(z4, [one(z4), one(z4)]) == zero(z4)
    assert commutator(z9, [one(z9), one(z9)]).classes() == [[0, 3, 6], [1, 4, 7], [2, 5, 8]]
    assert commutator(z9, [one(z9)] * 3) == zero(z9)


def test_nilpotency_examples(z4, z9, d8):
    assert nilpotency_degree(z4) == 1
    assert nilpotency_degree(z9) == 2
    assert nilpotency_degree(d8) == 2
    with pytest.warns(NoMalcevWarning):
        assert nilpotency_degree(semilattice(2)) is None


def test_commutator_budget(z9):
    with pytest.raises(CommutatorBudgetError, match='4-fold'):
        commutator(z9, [one(z9)] * 4)


def group_commutator_oracle(A, alpha, beta):
    """[alpha, beta] for a group: cosets of the subgroup generated by commutators [m, n]."""
    mul = A.operation('mul').full_table().reshape(A.size, A.size)
    inv = A.operation('inv').full_table()
    M = [a for a in range(A.size) if alpha.related(a, 0)]
    N = [a for a in range(A.size) if beta.related(a, 0)]
    gens = {int(mul[mul[inv[m], inv[n]], mul[m, n]]) for m in M for n in N}
    sub = {0}
    while True:
        new = {int(mul[a, g]) for a in sub for g in gens} | sub
        if new == sub:
            break
        sub = new
    return congruence_generated(A, [(0, s) for s in sub])


def test_binary_commutator_matches_group_theory(d8):
    cons = congruence_lattice(d8)
    assert len(cons) == 6     # normal subgroups of D8... with the trivial one
    for a, b in itertools.product(cons, repeat=2):
        assert commutator(d8, [a, b], malcev=True) == group_commutator_oracle(d8, a, b)


@pytest.mark.parametrize('make', [lambda: cyclic_group(4), klein, lambda: cyclic_group(3),
                                  lambda: cyclic_group(2)])
def test_commutator_monotone_and_below(make):
    A = make()
    cons = congruence_lattice(A)
    results = {}
    for a, b in itertools.product(cons, repeat=2):
        c = commutator(A, [a, b], malcev=True)
        assert c <= a.meet(b)
        results[a, b] = c
    for (a, b), c in results.items():
        for a2, b2 in itertools.product(cons, repeat=2):
            if a <= a2 and b <= b2:
                assert c <= results[a2, b2]


def test_higher_commutator_monotone_z9(z9):
    cons = congruence_lattice(z9)
    assert [len(c.classes()) for c in cons] == [9, 3, 1]
    vals = {}
    for combo in itertools.product(cons, repeat=3):
        vals[combo] = commutator(z9, list(combo), malcev=True)
    for c1, c2 in itertools.product(vals, repeat=2):
        if all(x <= y for x, y in zip(c1, c2)):
            assert vals[c1] <= vals[c2]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=4),
       st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=3))
def test_cg_is_closure_operator(n, pairs, extra):
    A = cyclic_group(n)
    pairs = [(a % n, b % n) for a, b in pairs]
    more = pairs + [(a % n, b % n) for a, b in extra]
    c = congruence_generated(A, pairs)
    assert all(c.related(a, b) for a, b in pairs)
    assert c <= congruence_generated(A, more)
    assert congruence_generated(A, c.pairs()) == c
    # compatible with every basic operation
    plus = A.operation('plus').full_table().reshape(n, n)
    for (a, b), (x, y) in itertools.product(c.pairs().tolist(), repeat=2):
        assert c.related(plus[a, x], plus[b, y])


def test_absorbing_examples(z4, z9):
    res = absorbing_polynomials(z4, 2)
    assert res.saturated and res.count == 1 and not res.tables.any()
    res = absorbing_polynomials(z9, 2)
    grid = all_tuples(9, 2)
    table = (3 * grid[:, 0] * grid[:, 1]) % 9
    assert any(np.array_equal(t, table) for t in res.tables)
    assert res.count == 3
    for A in (z4, z9):
        r = absorbing_polynomials(A, 1)
        assert any(not t.any() for t in r.tables)


def test_absorbing_module_path_agrees_with_filter(z9):
    # a tiny cap forces the module path at arity 2
    fresh = FiniteAlgebra(9, z9.operations.values(), zero=0)
    small = absorbing_polynomials(fresh, 2, cap=100)
    assert small.strategy == 'module' and small.count == 3
    assert np.array_equal(small.tables, absorbing_polynomials(z9, 2).tables)
    assert absorbing_polynomials(z9, 3).count == 1


def test_witness_examples(z4, z9):
    w = find_absorbing_witness(z9, 2)
    assert w.found and w.point == (1, 1) and w.value == 3
    grid = all_tuples(9, 2)
    assert np.array_equal(w.table, (3 * grid[:, 0] * grid[:, 1]) % 9)
    w = find_absorbing_witness(z4, 2)
    assert not w.found and w.saturated
    for n in (3, 4):
        w = find_absorbing_witness(z9, n)
        assert not w.found and w.saturated


def test_nu_examples(z4, z9, a3):
    assert supernilpotency_degree_absorbing(z4).degree == 2
    r = supernilpotency_degree_absorbing(z9)
    assert r.degree == 3 and r.status == 'exact'
    assert [e['saturated'] for e in r.arities] == [True, True, True]
    r = supernilpotency_degree_absorbing(a3, max_arity=5)
    assert r.degree is None and r.status == 'not-supernilpotent-up-to-cap'
    assert supernilpotency_degree_absorbing(trivial_algebra()).degree == 1


def test_cube_order_consistent(z4, z9, d8):
    for A, nu in ((z4, 2), (z9, 3), (d8, 3)):
        res, order = check_supernilpotency(A, max_arity=3)
        assert res.degree == nu and order == max(nu, 2)
    # [1,...,1] vanishes for every feasible k >= nu
    assert commutator(z4, [one(z4)] * 3) == zero(z4)
    assert cube_vanishing_order(trivial_algebra()) == 2


def test_template_clone_is_complete(a3):
    # 3x^2 needs f@2 even for unary polynomials
    cl = clone_closure(a3, 1)
    assert cl.saturated and cl.size == 243
    x = np.arange(9)
    assert cl.contains(3 * x * x % 9)
    assert clone_closure(a3, 2).size == 9 ** 3 * 3 ** 9 // 27


def test_template_commutator_warns(a3):
    one = Partition.total(9)
    with pytest.warns(TemplateTruncationWarning):
        c = commutator(a3, [one, one], malcev=True)
    assert c.classes() == [[0, 3, 6], [1, 4, 7], [2, 5, 8]]
