"""
Splitting a polynomial into absorbing pieces
============================================

Every polynomial f(x1..xm) is a left-nested loop product r_0 * r_1 * ... of
polynomials where r_k gathers the 0-absorbing parts depending on k variables.
"""

import numpy as np

from eqsolv import fixture
from eqsolv.decomposition import decompose, verify_decomposition
from eqsolv.loop import derive_loop
from eqsolv.terms import parse_term, random_term

z9 = fixture('z9_f2')
loop = derive_loop(z9, 'plus(plus(x1, neg(x2)), x3)')

f = parse_term('plus(f@2(x1, x2), plus(x1, #4))', z9)
d = decompose(f, z9, loop, base=(1, 1), nu=3)
print(d.describe(max_length=120))
print(verify_decomposition(d).summary())

# random polynomials, checked on every tuple
rng = np.random.default_rng(3)
ok = 0
for _ in range(20):
    g = random_term(z9, rng, 3, 25)
    ok += verify_decomposition(decompose(g, z9, loop, nu=3, m=3)).passed
print(f'{ok}/20 random decompositions verified')
