"""detvar: determinantal rank loci of bipartite quantum states.

A state rho on C^m (x) C^n attaches to every point r of CP^{m-1} the
positive-semidefinite Hermitian form sum_{i,j} r_i r_j^* rho_ij.  The
sets where that form drops rank are determinantal varieties that move
linearly under local unitaries, degenerate to unions of linear
subspaces for separable states, and encode the Schmidt number of pure
states through the dimension of their kernel locus.  This package
computes those loci numerically and symbolically, and ships a CLI
(`detvar`) plus JSON file formats for states and polynomials.
"""

from .errors import (
    CombinatorialBlowup,
    DegreeZero,
    DetvarError,
    EnsembleMismatch,
    IndexOutOfRange,
    KOutOfRange,
    NotHermitian,
    NotNormalized,
    NotPositive,
    NotPure,
    ParseError,
    ShapeMismatch,
    TraceNotOne,
)
from .statecore import (
    DEFAULT_TOLERANCE,
    NEAR_BAND,
    DensityMatrix,
    Ensemble,
    ProductEnsemble,
    PureState,
    RankReport,
    RankTolerance,
    block,
    density_from_ensemble,
    derived_rng,
    eigen_ensemble,
    ensemble_gram,
    haar_unitary,
    image_rank_check,
    mix_ensemble,
    numerical_rank,
    partial_transpose,
    product_ensemble_to_ensemble,
    pure_projector,
    random_density_matrix,
    random_ensemble,
    random_product_ensemble,
    random_pure_state,
    rank_report,
    swap_factors,
    validate_density,
)
from .pencil import (
    PencilBlocks,
    ProjectivePoint,
    eval_hermitian_pencil,
    eval_hermitian_pencil_b,
    eval_holomorphic_pencil,
    hermitian_form_at,
    linear_pencil_at,
    pencil_blocks,
    projectively_close,
    pure_coefficients,
    sample_point,
)
from .invariants import (
    CovarianceReport,
    LocalUnitary,
    MembershipResult,
    SchmidtReport,
    check_covariance,
    form_scale,
    member_a,
    member_b,
    product_factors,
    pure_kernel_basis,
    pushforward_point,
    random_local_unitary,
    schmidt_number,
    transform_local,
)
from .symbolic import (
    CONSISTENT_WITH_SEPARABLE,
    FACTORED,
    INCONCLUSIVE,
    NONLINEAR_VARIETY_WITNESS,
    NOT_PRODUCT,
    DiagnosticReport,
    FactorizationResult,
    LinearForm,
    MultiPoly,
    StructureReport,
    divmod_linear,
    eval_poly,
    factor_into_linear_forms,
    linearity_diagnostic,
    minor_vanish_threshold,
    pencil_minor_polys,
    separable_minor_structure,
)

__version__ = "0.1.0"
