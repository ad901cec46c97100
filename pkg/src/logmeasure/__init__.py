"""Induced matrix norms, matrix measures, and diagonal-stability analysis.

The package evaluates a family of vector norms (l_p, linearly scaled,
polytope-gauge, and orthant-piecewise norms), computes the matrix norms
and matrix measures they induce, classifies norms as absolute or
orthant-monotonic, decides whether the induced measure treats diagonal
matrices the way contraction arguments need it to (admissibility), and
applies all of that to additive diagonal stability and diffusion-driven
instability of coupled linear systems.
"""

from .battery import (
    CERTIFIABLE_MATRIX,
    FRAGILE_MATRIX,
    BatteryReport,
    BatteryRow,
    builtin_battery,
    equivalence_table,
    hexagon_spec,
    parallelogram_spec,
    sheared_linf_spec,
)
from .classify import (
    Verdict,
    diag_norm_identity_check,
    is_absolute,
    is_orthant_monotonic,
)
from .common import DEFAULT_SEED
from .diffusion import (
    DIVERGENCE_CUTOFF,
    CoupledSystem,
    Trajectory,
    build_coupled,
    simulate,
    sync_verdict,
)
from .errors import (
    BaseNotHurwitz,
    DegenerateBall,
    DimensionMismatch,
    EigenFailure,
    InconsistentOracles,
    LogMeasureError,
    Marginal,
    NoExactPath,
    NotAdmissibleWarning,
    NotCentrallySymmetric,
    NotConvex,
    NotMetzler,
    NotNonnegativeDiagonal,
    NotOrthantMonotonic,
    NotPolyhedral,
    QuotientNotConverged,
    SingularScaling,
    StepTooLarge,
    UnsupportedDimension,
    ValidationError,
    WrongDimension,
)
from .measures import (
    MeasureResult,
    SandwichReport,
    check_measure_sandwich,
    estimate_induced_norm,
    induced_matrix_norm,
    matrix_measure,
    measure_quotient,
    spectral_abscissa,
)
from .norms import (
    Lp,
    PiecewiseOrthant,
    Polyhedral,
    Scaled,
    ValidatedNorm,
    eval_norm,
    norm_spec_from_json,
    norm_spec_to_json,
    unit_ball_vertices,
    validate_norm_spec,
)
from .stability import (
    AdmissibilityVerdict,
    Certificate,
    Counterexample,
    DiagonalSignReport,
    DStabilityReport,
    additive_d_stability_report,
    additive_d_stable_2x2,
    additive_d_stable_metzler,
    certify_additive_d_stability,
    diagonal_negativity_check,
    falsify_additive_d_stability,
    falsify_on_grid,
    is_admissible_measure,
    is_hurwitz,
    measure_of_diagonal,
    perturbation_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityVerdict",
    "BaseNotHurwitz",
    "BatteryReport",
    "BatteryRow",
    "CERTIFIABLE_MATRIX",
    "Certificate",
    "CoupledSystem",
    "Counterexample",
    "DEFAULT_SEED",
    "DIVERGENCE_CUTOFF",
    "DStabilityReport",
    "DegenerateBall",
    "DiagonalSignReport",
    "DimensionMismatch",
    "EigenFailure",
    "FRAGILE_MATRIX",
    "InconsistentOracles",
    "LogMeasureError",
    "Lp",
    "Marginal",
    "MeasureResult",
    "NoExactPath",
    "NotAdmissibleWarning",
    "NotCentrallySymmetric",
    "NotConvex",
    "NotMetzler",
    "NotNonnegativeDiagonal",
    "NotOrthantMonotonic",
    "NotPolyhedral",
    "PiecewiseOrthant",
    "Polyhedral",
    "QuotientNotConverged",
    "SandwichReport",
    "Scaled",
    "SingularScaling",
    "StepTooLarge",
    "Trajectory",
    "UnsupportedDimension",
    "ValidatedNorm",
    "ValidationError",
    "Verdict",
    "WrongDimension",
    "additive_d_stability_report",
    "additive_d_stable_2x2",
    "additive_d_stable_metzler",
    "build_coupled",
    "builtin_battery",
    "certify_additive_d_stability",
    "check_measure_sandwich",
    "diag_norm_identity_check",
    "diagonal_negativity_check",
    "equivalence_table",
    "estimate_induced_norm",
    "eval_norm",
    "falsify_additive_d_stability",
    "falsify_on_grid",
    "hexagon_spec",
    "induced_matrix_norm",
    "is_absolute",
    "is_admissible_measure",
    "is_hurwitz",
    "is_orthant_monotonic",
    "matrix_measure",
    "measure_of_diagonal",
    "measure_quotient",
    "norm_spec_from_json",
    "norm_spec_to_json",
    "parallelogram_spec",
    "perturbation_bounds",
    "sheared_linf_spec",
    "simulate",
    "spectral_abscissa",
    "sync_verdict",
    "unit_ball_vertices",
    "validate_norm_spec",
]
