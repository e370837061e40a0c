"""Weighted closed-chain / hub placement over convex constraint sets.

The library minimizes a weighted closed-polygon perimeter plus weighted
point-to-hub distances, with every chain vertex confined to its own convex
set and the hub point to another, using projected subgradient descent with
diminishing steps. It also provides the geometry primitives (projections,
distances, normal cones), structural diagnostics, a residual-based
first-order optimality verifier, file formats and an SVG renderer.
"""

from .errors import (
    HeronWaistError,
    InvalidInputError,
    NumericalError,
    SpecError,
    StructuralError,
    UnsupportedDimensionError,
)
from .geometry import (
    ANGULAR_TOL,
    Ball,
    Box,
    COINCIDENCE_THRESHOLD,
    ConvexSet,
    HalfSpace,
    MEMBERSHIP_TOL,
    Singleton,
    as_point,
    set_distance,
)
from .optimality import OptimalityReport, Verdict, VertexResidual, chain_residual, verify
from .problem import (
    Component,
    Configuration,
    DisjointnessReport,
    ExistenceReport,
    PairDistance,
    Problem,
    Weights,
    check_existence,
    check_nondegeneracy,
    check_pairwise_disjoint,
    connected_components,
    objective,
)
from .solver import (
    CHECKPOINT_TOLERANCES,
    SolveResult,
    SolverConfig,
    StepRule,
    StopReason,
    TraceRecord,
    initialize,
    multi_start,
    project_feasible,
    solve,
    step_size,
)
from .specio import (
    ParsedSpec,
    bundled_spec_names,
    bundled_spec_text,
    load_bundled_spec,
    load_problem,
    load_results,
    parse_problem,
    save_problem,
    save_results,
    serialize_problem,
    serialize_results,
)
from .subgradient import (
    SubgradientVector,
    chain_subgradient,
    full_subgradient,
    hub_subgradient,
    subgradient_bound,
)

__version__ = "0.1.0"

__all__ = [
    "ANGULAR_TOL",
    "Ball",
    "Box",
    "CHECKPOINT_TOLERANCES",
    "COINCIDENCE_THRESHOLD",
    "Component",
    "Configuration",
    "ConvexSet",
    "DisjointnessReport",
    "ExistenceReport",
    "HalfSpace",
    "HeronWaistError",
    "InvalidInputError",
    "MEMBERSHIP_TOL",
    "NumericalError",
    "OptimalityReport",
    "PairDistance",
    "ParsedSpec",
    "Problem",
    "Singleton",
    "SolveResult",
    "SolverConfig",
    "SpecError",
    "StepRule",
    "StopReason",
    "StructuralError",
    "SubgradientVector",
    "TraceRecord",
    "UnsupportedDimensionError",
    "Verdict",
    "VertexResidual",
    "Weights",
    "as_point",
    "bundled_spec_names",
    "bundled_spec_text",
    "chain_residual",
    "chain_subgradient",
    "check_existence",
    "check_nondegeneracy",
    "check_pairwise_disjoint",
    "connected_components",
    "full_subgradient",
    "hub_subgradient",
    "initialize",
    "load_bundled_spec",
    "load_problem",
    "load_results",
    "multi_start",
    "objective",
    "parse_problem",
    "project_feasible",
    "save_problem",
    "save_results",
    "serialize_problem",
    "serialize_results",
    "set_distance",
    "solve",
    "step_size",
    "subgradient_bound",
    "verify",
]
