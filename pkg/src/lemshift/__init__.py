"""lemshift: orthonormal polynomials and shift-operator diagnostics on lemniscates."""

from .asymptotics import (
    KboundReport,
    SequenceReport,
    aitken_limit,
    christoffel_lambda,
    christoffel_shift_check,
    exterior_kappa_check,
    islands_reference,
    kappa_ratio,
    kbound_scan,
    ratio_asymptotics,
    residue_kappa_ratio,
    weak_concentration,
)
from .boundary import (
    BoundaryComponent,
    BoundaryDiscretization,
    LemniscateSpec,
    SingularLevelError,
    TracingError,
    trace_boundary,
)
from .measures import (
    DiscretizedMeasure,
    MeasurePart,
    QuadratureConfig,
    apply_polynomial_weight,
    assemble_measure,
    discretize_area,
    hull_distance,
    region_mass,
    scale_measure,
)
from .operators import (
    BlockToeplitzReport,
    FiniteSection,
    RightLimitWindow,
    ShiftResidual,
    block_toeplitz_diagnostic,
    char_poly_check,
    operator_measure_identity,
    poly_of_section,
    right_limit,
    shift_residual,
    shift_residual_profile,
    trace_window,
)
from .orthopoly import (
    DegenerateMeasureError,
    HessenbergSection,
    OrthoBasis,
    evaluate_phi,
    orthogonalize,
    orthonormality_residual,
)
from .polynomials import PolynomialSpec, make_polynomial, polynomial_from_roots
from .runner import DiagnosticResult, RunReport, describe, known_ops, run_scenario
from .scenarios import (
    DiagnosticRequest,
    Expectation,
    Scenario,
    ScenarioError,
    load_scenario,
    parse_scenario,
    shipped_scenario_path,
    shipped_scenarios,
)

__version__ = "0.1.0"
