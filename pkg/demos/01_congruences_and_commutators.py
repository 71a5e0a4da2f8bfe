"""
Congruences, commutators and the supernilpotency degree
=======================================================

Walks through the structure computations on the bundled fixtures.
"""

from eqsolv import fixture
from eqsolv.congruence import (Partition, commutator, congruence_generated, congruence_lattice,
                               find_absorbing_witness, nilpotency_degree, supernilpotency_degree_absorbing)

z4 = fixture('z4')
z9 = fixture('z9_f2')     # Z_9 with +, -, 0 and f2(x, y) = 3xy
d8 = fixture('d8')

# the congruence generated by a pair is the least compatible equivalence
print('Cg(0,2) on Z4:', congruence_generated(z4, [(0, 2)]).classes())
print('congruences of Z9:', [c.classes() for c in congruence_lattice(z9)])

# commutators come from the cube construction
one = Partition.total(9)
print('[1,1] on Z9:', commutator(z9, [one, one]).classes())
print('[1,1,1] on Z9:', commutator(z9, [one, one, one]).classes())

for name, A in (('Z4', z4), ('Z9', z9), ('D8', d8)):
    print(f'nilpotency degree of {name}:', nilpotency_degree(A))

# nu: the least arity at which every 0-absorbing polynomial is constant 0
for name, A in (('Z4', z4), ('Z9', z9)):
    res = supernilpotency_degree_absorbing(A)
    print(f'nu({name}) = {res.degree} [{res.status}]')

# 3xy is absorbing but not zero, which is why nu(Z9) exceeds 2
w = find_absorbing_witness(z9, 2)
print('absorbing witness at arity 2:', w.point, '->', w.value)

# the full A_3 keeps producing absorbing operations in every arity
res = supernilpotency_degree_absorbing(fixture('a3'), max_arity=5)
print('A3:', res.status)
