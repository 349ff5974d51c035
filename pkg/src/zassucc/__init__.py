"""Exact finite Givens-gate decompositions for 2D-block unitary pair
coupled-cluster generators via the simplified Zassenhaus product."""

from .algebra import (AlgebraElement, NmaReport, bracket, check_nma,
                      corollary_check, iterated_adjoint, nma_certificate)
from .circuit import BlockRegisterLayout, CircuitIR, emit, export_text, simulate
from .decomposition import (DecompositionPlan, StarWord, decompose, decompose_n2,
                        phi_of_M, reparam_jacobian, star_decompose,
                        star_product, singular_transfer_witness)
from .fock import (ClusterParams, FockOperator, ModeIndexing, build_A, build_B,
                   build_creation, build_pair_minus, build_pair_plus,
                   build_reference, build_T1_general, build_T2prime_general,
                   build_X, build_Y, default_modes)
from .oracle import (RestrictedRep, TrotterReport, build_restricted, expm,
                     state_fidelity_check, trotter_compare)
from .zassenhaus import (ZassenhausSeries, bch_side_check, casas_recursion,
                         closed_form, duhamel_check, sum_series)

__version__ = "0.1.0"
