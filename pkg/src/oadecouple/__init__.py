"""Orthogonal-array toolkit for decoupling, time reversal, and controlization."""

__version__ = "0.1.0"

from .errors import ParseError, VerificationError
from .gf import Field, field_for_order
from .hamiltonian import (
    KLocalHamiltonian,
    Term,
    greedy_coloring,
    interaction_graph,
    random_chain,
    random_dense_all_terms,
    random_grid,
    random_klocal,
    random_sparse,
)
from .oa import (
    BUILTIN_ARRAYS,
    OrthogonalArray,
    builtin_array,
    construct_from_linear_code,
    construct_rao_hamming,
    restrict_columns,
    verify,
)
from .pauli import PauliString, QuditPauli, parse_string
from .protocols import (
    DEFAULT_VARIANTS,
    ExperimentConfig,
    ResultRow,
    SchemeVariant,
    estimate_resources,
    run_controlization_experiment,
    run_decoupling_experiment,
)
from .schemes import (
    Scheme,
    SchemeStep,
    average_hamiltonian,
    controlize,
    derive_time_reversal,
    scheme_from_oa,
    scheme_from_oa_with_coloring,
)

__all__ = [
    "BUILTIN_ARRAYS",
    "DEFAULT_VARIANTS",
    "ExperimentConfig",
    "Field",
    "KLocalHamiltonian",
    "OrthogonalArray",
    "ParseError",
    "PauliString",
    "QuditPauli",
    "ResultRow",
    "Scheme",
    "SchemeStep",
    "SchemeVariant",
    "Term",
    "VerificationError",
    "average_hamiltonian",
    "builtin_array",
    "construct_from_linear_code",
    "construct_rao_hamming",
    "controlize",
    "derive_time_reversal",
    "estimate_resources",
    "field_for_order",
    "greedy_coloring",
    "interaction_graph",
    "parse_string",
    "random_chain",
    "random_dense_all_terms",
    "random_grid",
    "random_klocal",
    "random_sparse",
    "restrict_columns",
    "run_controlization_experiment",
    "run_decoupling_experiment",
    "scheme_from_oa",
    "scheme_from_oa_with_coloring",
    "verify",
]
