"""
Equations and identities by bounded-support search
==================================================
"""

from eqsolv import fixture
from eqsolv.loop import derive_loop, with_loop
from eqsolv.solver import (brute_force_solve, check_identity, empirical_support_degree, normalize,
                           ramsey_upper, solve, support_bound)
from eqsolv.terms import parse_term

z4, z9 = fixture('z4'), fixture('z9_f2')
malcev = 'plus(plus(x1, neg(x2)), x3)'
l4, l9 = derive_loop(z4, malcev), derive_loop(z9, malcev)

# the theoretical bound is a Ramsey number and is far too large to search
print('R(n=1, k=2, l=3) =', ramsey_upper(1, 2, 3))
b = support_bound(z4, l4, 2)
print(f'Z4: l={b.l} k={b.k} d={b.d_text()}')
print('Z9: d =', support_bound(z9, l9, 3).d_text())

# a small degree found by search, certified where the whole clone is listed
for name, A in (('Z4', z4), ('Z9', z9)):
    e = empirical_support_degree(A, max_arity=4)
    print(f"{name}: d' = {e.d} ({e.status}, {e.method}, arity {e.arity})")

Z9 = with_loop(z9, l9)
f = parse_term('plus(f@2(x1, x2), x3)', Z9)
h = normalize(f, parse_term('#5'), l9)
rep = solve(h, Z9, 3, l9)
print('f = 5:', rep.verdict, rep.witness, f'after {rep.evaluations} evaluations')
print('brute force count:', brute_force_solve(h, Z9, l9).count)

rep = check_identity(parse_term('f@2(x1, x2)', Z9), Z9, 2, l9)
print('f2 = 0 identically?', rep.verdict, 'witness', rep.witness, 'value', rep.value)
