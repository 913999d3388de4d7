"""Exact computations linking stable multiaffine polynomials and total nonnegativity."""

from .errors import (
    DimensionError,
    DomainError,
    FormatError,
    GenerationError,
    NotAPointError,
    PreconditionError,
    SingularMatrixError,
    SizeCapError,
    TnnStableError,
    UnsupportedDegreeError,
)
from .gaussian import GaussianRational, gq, rational
from .grassmann import (
    GrassmannianPoint,
    PluckerVector,
    act,
    act_on_matrix,
    act_on_plucker,
    basis_indicator_polynomial,
    check_plucker_relations,
    dual_embedding,
    dual_variable_slots,
    is_tnn_point,
    plucker_of_matrix,
    polynomial_to_plucker,
    positroid_support,
    representing_polynomial,
    standard_point_matrix,
)
from .linalg import (
    GeneratorWord,
    Letter,
    RationalMatrix,
    compound_matrix,
    dual_matrix,
    generator_matrix,
    is_psd,
    is_totally_nonnegative,
    is_totally_positive,
    matrix_exp,
    minor,
    random_tnn_word,
    random_tp_matrix,
    word_to_matrix,
)
from .operators import (
    MultiaffineOperator,
    delta_Z,
    exp_t_delta,
    extend,
    sharp_of_matrix,
    sharp_via_generators,
    symbol,
    test_sharp_preserver_exact,
    test_stability_preserver,
)
from .poly import (
    MultiaffinePoly,
    SparsePoly,
    add,
    degree_slice,
    elementary_symmetric,
    evaluate,
    mul,
    partial_derivative,
    phase_normalize,
    verify_phase_gap_structure,
)
from .stability import (
    Status,
    StabilityVerdict,
    check_rayleigh,
    decide_stability,
    exact_stability_deg2,
    falsify_stability,
    grassmann_stability_oracle,
    inequality_4vars,
    permanent_poly,
    rayleigh_difference,
    sq_minor_poly,
)

__version__ = "0.1.0"
