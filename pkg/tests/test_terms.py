import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqsolv.algebra import cyclic_group, semilattice
from eqsolv.terms import (App, ArityError, Const, TermSyntaxError, UnassignedVariableError, UnknownOperationError,
                          Var, all_tuples, eval_support, evaluate, evaluate_many, format_term, mask_support,
                          parse_term, random_term, substitute, TermError)


def test_parse_length(z4):
    t = parse_term('plus(x1, neg(x2))', z4)
    assert t == App('plus', (Var(1), App('neg', (Var(2),))))
    assert t.length == 4


def test_syntax_error_at_end():
    with pytest.raises(TermSyntaxError) as exc:
        parse_term('plus(x1')
    assert exc.value.position == len('plus(x1')
    assert 'end of input' in str(exc.value)


def test_constant(z4):
    t = parse_term('#3', z4)
    assert t == Const(3) and t.length == 1


@pytest.mark.parametrize('src, err', [
    ('times(x1, x2)', UnknownOperationError),
    ('plus(x1)', ArityError),
    ('#4', TermError),
    ('plus(x1,, x2)', TermSyntaxError),
    ('x0', TermSyntaxError),
    ('plus(x1, x2) x3', TermSyntaxError),
    ('plus(x1, $)', TermSyntaxError),
])
def test_parse_errors(z4, src, err):
    with pytest.raises(err):
        parse_term(src, z4)


def test_nullary_and_family_names(z4, a3):
    assert evaluate(parse_term('plus(zero(), x1)', z4), z4, [3]) == 3
    t = parse_term('f@2(x1, x2)', a3)
    assert evaluate(t, a3, [2, 5]) == 3


def test_eval_examples(z4):
    assert evaluate(parse_term('plus(x1,x2)', z4), z4, {1: 1, 2: 3}) == 0
    m = parse_term('plus(plus(x1, neg(x2)), x3)', z4)
    for a, b in itertools.product(range(4), repeat=2):
        assert evaluate(m, z4, [a, a, b]) == b


def test_eval_errors(z4):
    with pytest.raises(UnassignedVariableError):
        evaluate(parse_term('plus(x1, x2)'), z4, [1])
    with pytest.raises(TermError):
        evaluate(parse_term('x1'), z4, [9])


def test_eval_support_example(z4):
    base = [1, 2, 3, 1, 2]
    assert mask_support(base, {1, 2, 5}, 0) == [1, 2, 0, 0, 2]
    t = parse_term('plus(plus(plus(x1, x2), plus(x3, x4)), x5)', z4)
    assert eval_support(t, z4, base, {1, 2, 5}) == evaluate(t, z4, [1, 2, 0, 0, 2])
    assert eval_support(t, z4, base, range(1, 6)) == evaluate(t, z4, base)
    c = parse_term('plus(x1, #2)', z4)
    assert eval_support(c, z4, [3], set()) == 2


def test_evaluate_many_matches_scalar(z9):
    rng = np.random.default_rng(3)
    grid = all_tuples(9, 2)
    for _ in range(20):
        t = random_term(z9, rng, 2, 20)
        many = evaluate_many(t, z9, grid)
        assert [evaluate(t, z9, list(r)) for r in grid] == many.tolist()


def test_substitute_keeps_sharing():
    shared = App('neg', (Var(1),))
    t = App('plus', (shared, shared))
    s = substitute(t, {1: Const(0)})
    assert s.args[0] is s.args[1]
    assert format_term(s) == 'plus(neg(#0), neg(#0))'


def test_all_tuples_odometer():
    assert all_tuples(2, 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]


# properties

ALGEBRAS = [cyclic_group(2), cyclic_group(3), cyclic_group(4), semilattice(3)]


@st.composite
def terms(draw, max_vars=3):
    A = ALGEBRAS[draw(st.integers(0, len(ALGEBRAS) - 1))]
    seed = draw(st.integers(0, 2 ** 32 - 1))
    n = draw(st.integers(1, max_vars))
    t = random_term(A, np.random.default_rng(seed), n, draw(st.integers(1, 25)))
    return A, n, t


@settings(max_examples=150, deadline=None)
@given(terms())
def test_round_trip(data):
    A, _, t = data
    s = format_term(t)
    assert parse_term(s, A) == t
    assert parse_term(s.replace(' ', '')) == t


@settings(max_examples=150, deadline=None)
@given(terms())
def test_length_counts_tokens(data):
    _, _, t = data
    s = format_term(t)
    tokens = [tok for tok in s.replace('(', ' ').replace(')', ' ').replace(',', ' ').split()]
    assert t.length == len(tokens)


@settings(max_examples=60, deadline=None)
@given(terms())
def test_eval_support_is_masked_eval(data):
    A, n, t = data
    zero = A.zero
    for base in itertools.product(range(A.size), repeat=n):
        for r in range(n + 1):
            for S in itertools.combinations(range(1, n + 1), r):
                masked = [b if i in S else zero for i, b in enumerate(base, 1)]
                assert eval_support(t, A, list(base), S) == evaluate(t, A, masked)


@settings(max_examples=60, deadline=None)
@given(terms())
def test_eval_deterministic(data):
    A, n, t = data
    grid = all_tuples(A.size, n)
    assert np.array_equal(evaluate_many(t, A, grid), evaluate_many(t, A, grid))
