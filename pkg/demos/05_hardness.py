"""
Graph colouring as an equation over A_3
=======================================

t_G takes the value 3 exactly on tuples whose cosets mod 3 properly colour
G, and 0 everywhere else.
"""

import numpy as np

from eqsolv.hardness import (build_ap, coloring_from_witness, complete_graph, cycle_graph, p_colorable,
                             reduce_graph)
from eqsolv.loop import derive_loop, with_loop
from eqsolv.solver import brute_force_solve, normalize
from eqsolv.terms import Const, all_tuples, evaluate_many, format_term

A = build_ap(3)
loop = derive_loop(A, 'plus(plus(x1, neg(x2)), x3)', check_nilpotent=False)
AL = with_loop(A, loop)

print('t_K3 =', format_term(reduce_graph(complete_graph(3), 3)))

for name, g in (('K3', complete_graph(3)), ('K4', complete_graph(4)), ('C5', cycle_graph(5))):
    t = reduce_graph(g, 3)
    vals = evaluate_many(t, A, all_tuples(9, g.vertices))
    rep = brute_force_solve(normalize(t, Const(3)), AL, loop, g.vertices)
    col = coloring_from_witness(rep.witness, 3) if rep.witness else None
    print(f'{name}: values {sorted(set(np.unique(vals).tolist()))}, t_G = 3 {rep.verdict}, '
          f'colouring {col}, 3-colourable {p_colorable(g, 3)}')
