import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from eqsolv.algebra import Operation, cyclic_group, dihedral_group
from eqsolv.closure import RowSet, find_group, generate
from eqsolv.congruence import clone_closure
from eqsolv.terms import all_tuples
from eqsolv.zmodule import AbelianCoordinates, ZModule


def clone_gens(A, n):
    grid = all_tuples(A.size, n)
    return np.concatenate([grid.T, np.repeat(np.arange(A.size)[:, None], len(grid), 1)])


def test_rowset():
    rs = RowSet(3)
    new = rs.add(np.array([[1, 2, 3], [1, 2, 3], [0, 0, 0]]))
    assert len(new) == 2 and len(rs) == 2
    assert rs.contains([0, 0, 0]) and not rs.contains([0, 0, 1])
    assert len(rs.add([[0, 0, 0]])) == 0


def test_find_group(z4, d8):
    g = find_group(z4.operations.values())
    assert g.op.name == 'plus' and g.abelian and g.identity == 0
    g = find_group(d8.operations.values())
    assert g.op.name == 'mul' and not g.abelian


def test_shortcuts_agree_with_naive(z4, z9, d8):
    for A, n in ((z4, 2), (z9, 1), (d8, 1)):
        gens = clone_gens(A, n)
        fast = generate(A, gens)
        slow = generate(A, gens, shortcuts=False)
        assert fast.saturated and slow.saturated
        assert np.array_equal(fast.rows, slow.rows)


def test_clone_sizes(z4, z9):
    # affine maps over Z4; c + sum a_i x_i + 3 sum b_ij x_i x_j over Z9
    assert clone_closure(z4, 2).size == 4 ** 3
    assert clone_closure(z9, 2).size == 9 ** 3 * 3 ** 3
    big = clone_closure(z9, 3)
    assert big.size == 9 ** 4 * 3 ** 6 and big.closure.strategy == 'module'
    assert big.tables is None and big.saturated


def test_module_membership(z9):
    cl = clone_closure(z9, 3).closure
    grid = all_tuples(9, 3)
    x, y, z = grid.T
    assert cl.contains((3 * x * y + 2 * z + 5) % 9)
    assert not cl.contains((x * y) % 9)
    assert not cl.contains((3 * x * y * z) % 9)
    assert cl.contains(np.zeros(729, dtype=np.int64))


def test_cap_reached():
    A = dihedral_group(4)
    cl = generate(A, clone_gens(A, 2), cap=50)
    assert not cl.saturated and cl.size is None


def test_template_ops_in_closure(a3):
    # f@1 = 3x and f@2 = 3xy are in the arity-2 closure of A_3
    cl = clone_closure(a3, 2)
    grid = all_tuples(9, 2)
    assert cl.contains((3 * grid[:, 0] * grid[:, 1]) % 9)


def brute_subgroup(table, gens, identity):
    n = table.shape[0]
    seen = {tuple([identity] * len(gens[0]))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for row in frontier:
            for g in gens:
                r = tuple(int(table[a, b]) for a, b in zip(row, g))
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return seen


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([4, 6, 8, 9, 12]), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_zmodule_matches_enumeration(n, width, seed):
    A = cyclic_group(n)
    table = A.operation('plus').full_table().reshape(n, n)
    rng = np.random.default_rng(seed)
    gens = rng.integers(0, n, size=(int(rng.integers(1, 4)), width))
    mod = ZModule(AbelianCoordinates(table, 0), width)
    for g in gens:
        mod.insert(g)
    sub = brute_subgroup(table, gens, 0)
    assert mod.size() == len(sub)
    for row in itertools.product(range(n), repeat=width):
        assert mod.contains(row) == (row in sub)


def test_abelian_coordinates_klein():
    # Z2 x Z2 as a table
    t = np.array([[a ^ b for b in range(4)] for a in range(4)])
    c = AbelianCoordinates(t, 0)
    assert sorted(c.orders) == [2, 2] and c.exponent == 2
    rows = np.array([[1, 2, 3]])
    assert np.array_equal(c.decode(c.encode(rows)), rows)


def test_multi_affine_detected(z9):
    f2 = z9.operation('f@2')
    bad = Operation('sq', 1, 9, (np.arange(9) ** 2) % 9)
    A = z9.with_operations([bad])
    assert clone_closure(z9, 2).closure.strategy == 'module'
    assert clone_closure(A, 1).closure.strategy != 'module'
    assert f2.arity == 2
