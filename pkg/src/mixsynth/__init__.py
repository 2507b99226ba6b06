"""mixsynth: certified convex approximation of quantum states, probabilistic
gate synthesis with quadratic error reduction, and desk-scale verification of
covering, volume, and distance-to-set formulas."""

__version__ = "0.1.0"

from mixsynth._backend import IMPL as kernel_backend
from mixsynth.covering import (BoundsReport, CoveringReport, ball_volume,
                               bounds_report, g4_bound, greedy_net,
                               mc_ball_volume, meridian_ball_covering,
                               meridian_covering)
from mixsynth.errors import (CoveringValidityError, DimensionMismatchError,
                             InsufficientLibraryError, MixsynthError,
                             PreconditionError, SolverStallError)
from mixsynth.measures import (DistanceBracket, SchmidtVector,
                               coherence_distance, isotropic_bracket,
                               isotropic_distance, isotropic_witness_scan,
                               product_net, separable_upper, simplex_formula,
                               werner_bracket, werner_distance,
                               werner_witness_scan)
from mixsynth.solver import (ConvexApproxProblem, ConvexApproxSolution,
                             SandwichResult, restrict_support, sandwich_check,
                             solve, symmetrize_witness, witness_objective)
from mixsynth.states import (DensityMatrix, PureState, bloch_vector,
                             density_from_bloch, fidelity, isotropic,
                             max_entangled, meridian_state, pauli_eigenstates,
                             sym_projectors, trace_distance, werner)
from mixsynth.symmetry import (SymmetryElement, SymmetryGroup, apply_symmetry,
                               group_closure, is_invariant)
from mixsynth.synthesis import (Circuit, Ensemble, SynthesisConfig,
                                SynthesisLibrary, conjugate_circuit,
                                deterministic_synthesize, enumerate_library,
                                probabilistic_synthesize, tcount_experiment)

__all__ = [
    "__version__", "kernel_backend",
    "MixsynthError", "PreconditionError", "DimensionMismatchError",
    "CoveringValidityError", "InsufficientLibraryError", "SolverStallError",
    "PureState", "DensityMatrix", "trace_distance", "fidelity",
    "meridian_state", "pauli_eigenstates", "density_from_bloch",
    "bloch_vector", "sym_projectors", "max_entangled", "werner", "isotropic",
    "SymmetryElement", "SymmetryGroup", "group_closure", "apply_symmetry",
    "is_invariant",
    "ConvexApproxProblem", "ConvexApproxSolution", "SandwichResult", "solve",
    "witness_objective", "symmetrize_witness", "restrict_support",
    "sandwich_check",
    "CoveringReport", "BoundsReport", "meridian_covering",
    "meridian_ball_covering", "greedy_net", "ball_volume", "mc_ball_volume",
    "g4_bound", "bounds_report",
    "Circuit", "SynthesisLibrary", "SynthesisConfig", "Ensemble",
    "enumerate_library", "conjugate_circuit", "deterministic_synthesize",
    "probabilistic_synthesize", "tcount_experiment",
    "SchmidtVector", "DistanceBracket", "werner_distance",
    "isotropic_distance", "werner_witness_scan", "isotropic_witness_scan",
    "product_net", "separable_upper", "coherence_distance", "simplex_formula",
    "werner_bracket", "isotropic_bracket",
]
