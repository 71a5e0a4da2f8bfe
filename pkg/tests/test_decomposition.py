import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqsolv import fixture
from eqsolv.algebra import AlgebraError
from eqsolv.decomposition import decompose, verify_decomposition
from eqsolv.loop import derive_loop, find_malcev
from eqsolv.terms import Const, all_tuples, evaluate_many, format_term, parse_term, random_term


def table(term, alg, variables):
    return evaluate_many(term, alg, all_tuples(alg.size, len(variables)), variables)


def test_unary_identity(z4, z4_loop):
    d = decompose(parse_term('x1'), z4, z4_loop, base=(2,))
    assert format_term(d.factors[0]) == '#0'
    assert format_term(d.absorbing[(1,)]) == '_ldiv(#0, x1)'
    assert np.array_equal(table(d.factors[1], d.algebra, (1,)), np.arange(4))
    assert d.complete
    assert verify_decomposition(d).passed


def test_constant(z4, z4_loop):
    d = decompose(Const(3), z4, z4_loop, m=3)
    assert format_term(d.factors[0]) == '#3'
    for S, t in d.absorbing.items():
        assert not table(t, d.algebra, S).any()
    for r in d.factors[1:]:
        assert not table(r, d.algebra, (1, 2, 3)).any()
    assert verify_decomposition(d).passed


def test_f2_example(z9, z9_loop):
    d = decompose(parse_term('f@2(x1,x2)', z9), z9, z9_loop, base=(1, 1), nu=3)
    assert d.factors[0] == Const(0)
    assert not table(d.absorbing[(1,)], d.algebra, (1,)).any()
    assert not table(d.absorbing[(2,)], d.algebra, (2,)).any()
    g = all_tuples(9, 2)
    assert np.array_equal(table(d.absorbing[(1, 2)], d.algebra, (1, 2)), 3 * g[:, 0] * g[:, 1] % 9)
    assert np.array_equal(table(d.factors[2], d.algebra, (1, 2)), 3 * g[:, 0] * g[:, 1] % 9)
    rep = verify_decomposition(d)
    assert rep.passed and rep.exhaustive and rep.checked['product'] == 81


def test_tampered_r0_fails(z9, z9_loop):
    d = decompose(parse_term('f@2(x1,x2)', z9), z9, z9_loop)
    d.factors[0] = Const(1)
    rep = verify_decomposition(d)
    assert not rep.passed
    assert rep.failures[0]['check'] == 'r_0' and rep.failures[0]['point'] == (0, 0)


def test_bad_arguments(z4, z4_loop):
    with pytest.raises(AlgebraError):
        decompose(parse_term('x1'), z4, z4_loop, enumeration=(0, 1, 1, 3))
    with pytest.raises(AlgebraError):
        decompose(parse_term('x2'), z4, z4_loop, base=(0,))


def test_group_order_follows_enumeration(z9, z9_loop):
    f = parse_term('plus(f@2(x1,x2), plus(f@2(x1,x3), f@2(x2,x3)))', z9)
    base = (1, 2, 4)
    d1 = decompose(f, z9, z9_loop, base=base)
    d2 = decompose(f, z9, z9_loop, base=base, enumeration=tuple(reversed(range(9))))
    vals = [d1.values[S] for S in d1.order(2)]
    assert vals == sorted(vals)
    assert [d2.values[S] for S in d2.order(2)] == sorted(vals, reverse=True)
    for d in (d1, d2):
        assert verify_decomposition(d).passed


def test_cutoff_at_nu(z9, z9_loop):
    f = parse_term('f@2(plus(x1, x2), plus(x3, x4))', z9)
    d = decompose(f, z9, z9_loop, nu=3)
    assert d.depth == 3 and d.complete and len(d.factors) == 4
    full = decompose(f, z9, z9_loop, nu=3, depth_cap=4)
    rep = verify_decomposition(full)
    assert rep.passed and rep.checked['vanishing'] == 2 * 9 ** 4
    short = decompose(f, z9, z9_loop, nu=3, depth_cap=2)
    assert short.complete and verify_decomposition(short).passed
    assert not decompose(f, z9, z9_loop, depth_cap=2).complete


def test_deterministic(z9, z9_loop):
    f = parse_term('f@2(plus(x1, #4), neg(x2))', z9)
    a = decompose(f, z9, z9_loop, base=(3, 5))
    b = decompose(f, z9, z9_loop, base=(3, 5))
    assert [format_term(r) for r in a.factors] == [format_term(r) for r in b.factors]
    assert a.describe() == b.describe()


def test_sampled_verification_records_seed(z9, z9_loop):
    f = parse_term('f@2(plus(x1, x2), plus(x3, x4))', z9)
    d = decompose(f, z9, z9_loop, nu=3)
    rep = verify_decomposition(d, exhaustive_limit=100, samples=200, seed=7)
    assert rep.passed and not rep.exhaustive and rep.seed == 7
    assert 'seed 7' in rep.summary()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(['z4', 'z9', 'd8']), st.integers(1, 3))
def test_random_reconstruction(seed, which, m):
    A = fixture({'z4': 'z4', 'z9': 'z9_f2', 'd8': 'd8'}[which])
    malcev = find_malcev(A).term
    loop = derive_loop(A, malcev, check_nilpotent=False)
    rng = np.random.default_rng(seed)
    f = random_term(A, rng, m, 25)
    base = tuple(int(v) for v in rng.integers(0, A.size, m))
    d = decompose(f, A, loop, base=base, m=m)
    rep = verify_decomposition(d)
    assert rep.passed, rep.summary()
    # every t_S is 0-absorbing and the product reproduces f
    assert rep.checked['product'] == A.size ** m
