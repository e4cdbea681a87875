"""Exceptional-point Hamiltonians with clustered (K > 1) degeneracies.

Builders for direct sums of scaled tridiagonal anharmonic-oscillator
blocks, exact and floating spectral/Jordan analysis at the exceptional
point, metric operators, and the enumeration of admissible splits of the
diagonal {1-N, 3-N, ..., N-1}.
"""
from .errors import (BackendError, BracketError, ClusterizationError, DegeneracyError,
                     DomainError, EPClustError, SolverError, SpectralError, StructuralError)
from .exact import ExactScalar, exact_sqrt
from .hamiltonians import (HamiltonianMatrix, ModelFamily, TaoFamily, Toy7Family,
                           add_antisymmetric_perturbation, build_from_decomposition,
                           build_jordan, build_pentadiagonal_special, build_tao, build_tao_ep,
                           build_toy7, g_from_kappa, pentadiagonal_ep_couplings,
                           split_by_coupling_graph, tao_family, toy7_energies,
                           toy7_energies_kappa)
from .metric import (MetricOperator, SweepRow, corridor_sweep, inner_product,
                     is_positive_definite, metric_basis, metric_from_left_eigenvectors)
from .spectral import (ClusterAssignment, JordanStructure, SpectralReport, TransitionMatrix,
                       cluster_levels, eigen, find_ep, jordan_structure, numerical_rank,
                       transition_matrix, verify_intertwiner)
from .symbols import (BoxedSymbol, Decomposition, SequenceReport, classification_table,
                      count_even, count_odd, count_scenarios, enumerate_decompositions)

__version__ = "0.1.0"
