"""Alternating projections with convergence diagnostics and frame design.

The package has three layers:

* projectors and the alternating-projection engine
  (:mod:`altproj.projectors`, :mod:`altproj.engine`),
* post-hoc trace diagnostics: sufficient-decrease and contraction
  certificates plus convergence-rate classification
  (:mod:`altproj.diagnostics`),
* two finite-frame design pipelines built on the engine: prescribed
  column norms and equiangular tight frames (:mod:`altproj.frames`).

Traces move between runs and analyses through :mod:`altproj.traceio`
and the ``altproj`` command line tool.
"""

from .diagnostics import (
    RATE_FINITE,
    RATE_LINEAR,
    RATE_SUBLINEAR,
    AssumptionCertificate,
    DiagnosticsReport,
    KLEstimate,
    NormGuardReport,
    analyze_trace,
    certify_assumptions,
    check_column_norm_guards,
    check_frame_three_point,
    check_sufficient_decrease,
    default_contraction_epsilon,
    estimate_contraction,
    estimate_kl_exponent,
)
from .engine import (
    AlternatingProjections,
    IterateTrace,
    RunConfig,
    TraceRecord,
    multi_start,
    replace_config,
    run_alternating_projections,
)
from .exceptions import (
    AltprojError,
    ConfigError,
    DegenerateTraceError,
    InsufficientDataError,
    InvalidInputError,
    NumericalFailureError,
    RankDeficiencyError,
)
from .frames import (
    EquiangularFrameDesign,
    EtfCertificate,
    FrameDesignConfig,
    FrameDesignResult,
    PrescribedNormFrameDesign,
    check_etf_initialization,
    design_etf,
    design_prescribed_norm_frame,
    eigen_gap,
    extract_frame_from_gram,
    first_certified_iteration,
    mutual_coherence,
    real_etf_known_to_exist,
    tight_parameter,
    tightness_residual,
    welch_bound,
)
from .projectors import (
    AffineProjector,
    BoxProjector,
    ColumnNormProjector,
    CoherenceProjector,
    GramTightProjector,
    HalfspaceProjector,
    Projector,
    TightFrameProjector,
)
from .traceio import read_trace_csv, write_json, write_trace_csv

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # engine
    "RunConfig",
    "TraceRecord",
    "IterateTrace",
    "run_alternating_projections",
    "multi_start",
    "replace_config",
    "AlternatingProjections",
    # projectors
    "Projector",
    "BoxProjector",
    "HalfspaceProjector",
    "AffineProjector",
    "ColumnNormProjector",
    "TightFrameProjector",
    "GramTightProjector",
    "CoherenceProjector",
    # diagnostics
    "RATE_FINITE",
    "RATE_LINEAR",
    "RATE_SUBLINEAR",
    "AssumptionCertificate",
    "KLEstimate",
    "NormGuardReport",
    "DiagnosticsReport",
    "check_sufficient_decrease",
    "estimate_contraction",
    "default_contraction_epsilon",
    "certify_assumptions",
    "estimate_kl_exponent",
    "check_frame_three_point",
    "check_column_norm_guards",
    "analyze_trace",
    # frames
    "welch_bound",
    "mutual_coherence",
    "tight_parameter",
    "tightness_residual",
    "eigen_gap",
    "extract_frame_from_gram",
    "EtfCertificate",
    "check_etf_initialization",
    "first_certified_iteration",
    "real_etf_known_to_exist",
    "FrameDesignConfig",
    "FrameDesignResult",
    "design_prescribed_norm_frame",
    "design_etf",
    "PrescribedNormFrameDesign",
    "EquiangularFrameDesign",
    # trace io
    "write_trace_csv",
    "read_trace_csv",
    "write_json",
    # exceptions
    "AltprojError",
    "InvalidInputError",
    "RankDeficiencyError",
    "NumericalFailureError",
    "DegenerateTraceError",
    "InsufficientDataError",
    "ConfigError",
]
