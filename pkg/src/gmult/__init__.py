"""Operator-valued multipliers and generalized Hilbert-Schmidt / trace classes.

Finite-dimensional models: H = C^d, H0 = C^d0, and sequences of N operators
H -> H0. The hot loops run in a compiled extension when it is available and in
numpy otherwise (see :data:`gmult.kernels.BACKEND`).
"""

from .errors import (
    BiorthogonalityViolated,
    DimMismatch,
    GmultError,
    NotHermitian,
    NotOrthonormalBasis,
    NotPSD,
    NotRieszBasis,
    NotTraceClass,
    NotUnitary,
    ParseError,
    PreconditionFailed,
    ScenarioError,
    SharedDataMismatch,
    ValidationError,
    ZeroProbe,
    ZeroVector,
)
from .gbessel import (
    OpSequence,
    TailLaw,
    classify,
    frame_operator,
    onb_transition_unitary,
    optimal_bessel_bound,
    random_onb,
    riesz_transition,
)
from .harness import Scenario, demo, parse_scenario, run_scenario, serialize_scenario
from .kernels import BACKEND
from .linalg import (
    ConjLinearIsometry,
    PolarDecomposition,
    conj_isometry_apply,
    frobenius_norm,
    operator_norm,
    polar_decompose,
    rank_one,
    sqrt_psd,
    trace_norm,
)
from .multiplier import (
    MultiplierSpec,
    WeightSeq,
    assemble,
    compose_maps,
    convergence_study,
    existence_bound,
    hs_bound,
    lower_bound,
    mmstar_reduction,
    mstarm_reduction,
    multiplier_adjoint,
    norm_product_bound,
    nuclear_bound,
    power_formula,
    product_general,
    recover_lambda,
    symbolic_product,
    tail_compactness,
    unbounded_sweep,
)
from .report import CheckRecord, VerificationReport, emit_report
from .schatten import (
    GhsContext,
    MembershipVerdict,
    admissible_subspace,
    ghs_inner,
    ideal_suite,
    inner_suite,
    is_member,
    is_member_trace_class,
    pframe_lower_constant,
    sigma,
    std_context,
    tau,
    tau_suite,
    trace,
    trace_suite,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BiorthogonalityViolated",
    "CheckRecord",
    "ConjLinearIsometry",
    "DimMismatch",
    "GhsContext",
    "GmultError",
    "MembershipVerdict",
    "MultiplierSpec",
    "NotHermitian",
    "NotOrthonormalBasis",
    "NotPSD",
    "NotRieszBasis",
    "NotTraceClass",
    "NotUnitary",
    "OpSequence",
    "ParseError",
    "PolarDecomposition",
    "PreconditionFailed",
    "Scenario",
    "ScenarioError",
    "SharedDataMismatch",
    "TailLaw",
    "ValidationError",
    "VerificationReport",
    "WeightSeq",
    "ZeroProbe",
    "ZeroVector",
    "admissible_subspace",
    "assemble",
    "classify",
    "compose_maps",
    "conj_isometry_apply",
    "convergence_study",
    "demo",
    "emit_report",
    "existence_bound",
    "frame_operator",
    "frobenius_norm",
    "ghs_inner",
    "hs_bound",
    "ideal_suite",
    "inner_suite",
    "is_member",
    "is_member_trace_class",
    "lower_bound",
    "mmstar_reduction",
    "mstarm_reduction",
    "multiplier_adjoint",
    "norm_product_bound",
    "nuclear_bound",
    "onb_transition_unitary",
    "operator_norm",
    "optimal_bessel_bound",
    "parse_scenario",
    "pframe_lower_constant",
    "polar_decompose",
    "power_formula",
    "product_general",
    "random_onb",
    "rank_one",
    "recover_lambda",
    "riesz_transition",
    "run_scenario",
    "serialize_scenario",
    "sigma",
    "sqrt_psd",
    "std_context",
    "symbolic_product",
    "tail_compactness",
    "tau",
    "tau_suite",
    "trace",
    "trace_norm",
    "trace_suite",
    "unbounded_sweep",
]
