"""Equation solvability and identity checking over finite Mal'cev algebras."""

from .algebra import (AlgebraError, AlgebraFileError, FiniteAlgebra, Operation, cyclic_group, dihedral_group,
                      format_algebra, load_algebra, parse_algebra, semilattice, trivial_algebra)
from .congruence import (Partition, absorbing_polynomials, check_supernilpotency, clone_closure, commutator,
                         congruence_generated, cube_vanishing_order, find_absorbing_witness, nilpotency_degree,
                         supernilpotency_degree_absorbing)
from .decomposition import Decomposition, decompose, verify_decomposition
from .hardness import GraphInstance, build_ap, coloring_from_witness, p_colorable, reduce_graph, witness_from_coloring
from .loop import LoopStructure, derive_loop, find_malcev, left_power, verify_malcev, with_loop
from .solver import (SolveReport, SupportBound, brute_force_solve, check_identity, empirical_support_degree,
                     normalize, ramsey_upper, solve, support_bound)
from .terms import (App, Const, Term, Var, eval_support, evaluate, evaluate_many, format_term, parse_term,
                    random_term)

__version__ = '0.1.0'


def fixture(name: str) -> FiniteAlgebra:
    """One of the bundled algebras: z4, z9_f2, a3, d8, sl2, trivial."""
    from pathlib import Path
    return load_algebra(Path(__file__).parent / 'data' / f'{name}.alg')
