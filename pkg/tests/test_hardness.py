import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqsolv.algebra import AlgebraError, AlgebraFileError
from eqsolv.hardness import (GraphInstance, all_graphs, build_ap, coloring_from_witness, complete_graph,
                             cycle_graph, evaluate_reduction, format_graph, is_proper, p_colorable,
                             parse_graph, reduce_graph, witness_from_coloring)
from eqsolv.terms import all_tuples, evaluate, evaluate_many, format_term, parse_term


def test_build_ap():
    A = build_ap(3)
    assert A.size == 9
    assert evaluate(parse_term('f@2(x1,x2)', A), A, [2, 5]) == 3
    assert evaluate(parse_term('f@4(x1,x2,x3,x4)', A), A, [1, 1, 1, 3]) == 0
    with pytest.raises(AlgebraError, match='not prime'):
        build_ap(4)


def test_reduce_examples():
    A = build_ap(3)
    t = reduce_graph(complete_graph(3), 3)
    assert t.op == 'f@6' and len(t.args) == 6
    assert evaluate(t, A, [0, 1, 2]) == 3
    assert evaluate_reduction(GraphInstance(2, [(0, 1)]), 3, (4, 1)) == 0
    assert not evaluate_many(reduce_graph(complete_graph(4), 3), A, all_tuples(9, 4)).any()
    with pytest.raises(AlgebraError):
        reduce_graph(complete_graph(3), 2)
    with pytest.raises(AlgebraError):
        reduce_graph(GraphInstance(3), 3)


def test_reduction_term_text():
    t = reduce_graph(GraphInstance(2, [(1, 0)]), 3)
    assert format_term(t) == 'f@2(plus(x1, neg(x2)), plus(x1, neg(x2)))'


def test_coloring_examples():
    k3 = complete_graph(3)
    assert coloring_from_witness((0, 1, 2), 3) == (0, 1, 2)
    assert coloring_from_witness((3, 4, 8), 3) == (0, 1, 2)
    assert is_proper(k3, (0, 1, 2))
    assert not is_proper(k3, coloring_from_witness((0, 0, 0), 3))
    w = witness_from_coloring((0, 1, 2), 3)
    assert w == (0, 1, 2) and evaluate_reduction(k3, 3, w) == 3
    assert evaluate_reduction(k3, 3, witness_from_coloring((0, 1, 1), 3)) == 0
    with pytest.raises(ValueError):
        witness_from_coloring((0, 3), 3)


def test_p_colorable():
    assert p_colorable(complete_graph(3), 3)
    assert not p_colorable(complete_graph(4), 3)
    assert p_colorable(cycle_graph(5), 3)
    assert not p_colorable(cycle_graph(5), 2)
    with pytest.raises(AlgebraError):
        p_colorable(GraphInstance(30), 3)


def test_graph_io():
    g = parse_graph('vertices 3 % triangle\nedge 0 1\nedge 2 1\n# comment\nedge 0 2\n')
    assert g == complete_graph(3)
    assert parse_graph(format_graph(g)) == g
    for bad in ('edge 0 1\n', 'vertices 2\nedge 0 0\n', 'vertices 2\nedge 0 5\n', 'vertices x\n'):
        with pytest.raises(AlgebraFileError):
            parse_graph(bad)


def test_all_graphs_count():
    assert sum(1 for _ in all_graphs(4)) == 64


@pytest.mark.parametrize('p', [3, 5])
def test_values_are_zero_or_p(p):
    A = build_ap(p)
    g = cycle_graph(3) if p == 3 else GraphInstance(3, [(0, 1), (1, 2)])
    vals = evaluate_many(reduce_graph(g, p), A, all_tuples(p * p, 3))
    assert set(np.unique(vals).tolist()) <= {0, p}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=4, max_size=4), st.lists(st.integers(0, 2), min_size=4, max_size=4),
       st.integers(0, 63))
def test_coset_invariance(w, shift, mask):
    # moving any vertex within its coset of 3Z_9 leaves t_G unchanged
    g = list(all_graphs(4))[mask]
    if not g.edges:
        return
    moved = [(a + 3 * s) % 9 for a, s in zip(w, shift)]
    assert evaluate_reduction(g, 3, w) == evaluate_reduction(g, 3, moved)
    assert (evaluate_reduction(g, 3, w) == 3) == is_proper(g, coloring_from_witness(w, 3))


def test_correspondence_small_graphs():
    A = build_ap(3)
    for n in range(2, 5):
        grid = all_tuples(9, n)
        for g in all_graphs(n):
            if not g.edges:
                continue
            vals = evaluate_many(reduce_graph(g, 3), A, grid, range(1, n + 1))
            assert (vals == 3).any() == p_colorable(g, 3)
