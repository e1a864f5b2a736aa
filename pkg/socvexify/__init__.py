from socvexify._errors import SocvexifyError
from socvexify._config import (
    Tolerances,
    ConfigError,
    get_tolerances,
    set_tolerances,
    tolerances_from_environment,
)
from socvexify._norms import NormKind
from socvexify._binary_domain import BinaryDomain, BinaryDomainError
from socvexify._rhs_function import RhsFunction, TableRhs, SqrtQuadraticRhs, RhsFunctionError
from socvexify._conic_set import ConicSet, YBox, ConicSetError, validate
from socvexify._verdicts import (
    VerdictStatus,
    MembershipVerdict,
    SupportPoint,
    EnvelopeCertificate,
)
from socvexify._linalg import (
    cholesky,
    is_positive_definite,
    qr_factorize,
    project_onto_colspace,
    column_compress,
    random_orthogonal,
    psd_factor,
    LinalgError,
    NotPositiveDefinite,
)
from socvexify._solve_result import SolveStatus, Sense, SolveResult
from socvexify._lp_solver import LpProblem, solve_lp, LpSolverError
from socvexify._socp_solver import SocRow, SocpProblem, solve_socp, as_lp, SocpSolverError
from socvexify._model_ir import (
    Variable,
    AffineExpr,
    LinearConstraint,
    SocConstraint,
    QuadraticConstraint,
    RotatedConeConstraint,
    Objective,
    ModelIR,
    import_model,
    export_model,
    ModelIRError,
    UnrepresentableConstraint,
)
from socvexify._bruteforce import (
    ModelSolution,
    solve_bruteforce,
    solve_continuous,
    BruteForceError,
    NonConvexContinuousPart,
)
from socvexify._envelope import (
    concave_envelope,
    convex_envelope,
    contains_hull_point,
    envelope_gap_to_function,
    envelope_on_domain,
    dirichlet_hull_points,
    dirichlet_weights,
    EnvelopeGap,
    EnvelopeError,
    QueryOutsideHull,
)
from socvexify._reformulate import (
    QuadraticForm,
    QuadConstraint,
    DrccConstraint,
    DrccReformulation,
    SocPieces,
    NormalizationReport,
    normalize_assumption2,
    quad_to_soc,
    drcc_to_quad,
    ReformulationError,
    NormalizationError,
    EmptyDomainAfterRestriction,
)
from socvexify._hull_verify import (
    membership_Z,
    membership_W,
    membership_conv_perspective,
    perspective_problem,
    perspective_start,
    verify_hull_equivalence,
    example1_fixture,
    example2_fixture,
    random_hull_instance,
    run_hull_suite,
    HullPoint,
    HullReport,
    HullSuiteReport,
    HullVerifyError,
    PointNotInDomain,
    PerspectiveError,
    HullNumericalLimit,
)
from socvexify._relaxation import (
    sqrt_envelope_value,
    gap_bound,
    verify_prop1,
    bhatia_davis_check,
    Prop1Report,
    RelaxationError,
    InvalidRange,
)
from socvexify._knapsack import (
    Resource,
    KnapsackInstance,
    generate_kp,
    generate_mkp,
    build_ccp,
    build_soc,
    ccp_relaxation,
    soc_envelope_relaxation,
    relaxation_bounds,
    RelaxationBounds,
    KnapsackError,
    InvalidType,
    SigmaTildeNotPD,
)
