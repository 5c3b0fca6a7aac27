"""Proximal-subgradient steepest descent with exact line search.

Quick use::

    from proxdescent import make_l2_quadratic, run_nsdm
    spec = make_l2_quadratic([1.0, 2.0, 2.0])
    trace = run_nsdm(spec.oracle, spec.x0)
"""
from . import backend
from .core import (
    Certificate,
    CertificateKind,
    DimensionError,
    EmptyHullError,
    EmptyPieces,
    InsufficientTrace,
    InvalidStart,
    IterationRecord,
    NonFiniteValue,
    NonUnitDirection,
    NotQuadratic,
    NotSmooth,
    NotSmoothAt,
    ProxDescentError,
    RunTrace,
    SingularMatrix,
    Status,
    Violation,
)
from .descent import SolverConfig, descent_bound_report, run_nsdm, run_sdm
from .linesearch import LineSearchResult, LineSearchStatus, bracket_minimum, exact_line_search, golden_section
from .oracle import (
    BoxProduct,
    ClassTag,
    FiniteHull,
    L1CompositeOracle,
    MaxAffineOracle,
    Oracle,
    QuadraticOracle,
    Rosenbrock,
    Rule,
    Singleton,
    SmoothOracle,
    abs_value,
    evaluate,
    l2_quadratic,
    min_norm_in_hull,
    prox_subdifferential,
    select_subgradient,
    smooth,
)
from .problems import (
    ProblemSpec,
    corpus_by_id,
    default_corpus,
    make_abs,
    make_l1_composite,
    make_l2_quadratic,
    make_max_affine,
    make_seeded_l2_quadratic,
    make_smooth_nonconvex,
    make_strictly_convex_quadratic,
)
from .verify import (
    SamplingPlan,
    check_hessian_bounds,
    check_prox_regularity,
    check_prox_subgradient,
    check_subdiff_lipschitz,
    finite_difference_gradient_check,
    level_set_samples,
)

__version__ = "0.1.0"
