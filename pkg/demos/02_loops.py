"""
Mal'cev terms and derived loops
===============================
"""

import numpy as np

from eqsolv import fixture
from eqsolv.algebra import semilattice
from eqsolv.loop import derive_loop, find_malcev, left_power, verify_malcev
from eqsolv.terms import format_term

z4 = fixture('z4')

# the search finds a term inducing x - y + z
found = find_malcev(z4)
print('Mal\'cev term for Z4:', format_term(found.term))
print('projection x1:', verify_malcev(z4, 'x1').describe())

# semilattices have none, and the search proves it by saturating
print('semilattice:', find_malcev(semilattice(2)))

loop = derive_loop(z4, found.term)
print('x*y\n', loop.mul)
print('x\\y\n', loop.ldiv)
print('exponent', loop.exponent, '  1^4 =', left_power(loop, 1, 4))

# the dihedral group gives a non-commutative loop
d8 = fixture('d8')
dl = derive_loop(d8, find_malcev(d8).term)
print('D8 loop commutative:', bool(np.array_equal(dl.mul, dl.mul.T)), ' exponent', dl.exponent)
