"""Residual-based verification of first-order equilibrium at a candidate point.

For a convex problem, a feasible configuration is globally optimal exactly
when three force-balance conditions hold: at each chain vertex the weighted
unit vectors toward its cyclic neighbors and the hub sum to a vector whose
negation lies in the normal cone of that vertex's constraint set; the
analogous balance holds at the hub; and the chosen normal vectors sum to
zero overall. The third condition is implied by the first two because the
edge unit vectors cancel in antiparallel pairs and the radial unit vectors
cancel against the hub sum, so its norm doubles as a numerical
self-consistency check.

The equilibrium equations involve unit vectors, so they are not defined
when adjacent points (or a point and the hub) coincide; such vertices are
flagged and the overall verdict becomes indeterminate rather than a guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .geometry import COINCIDENCE_THRESHOLD, norm
from .problem import (
    Configuration,
    DisjointnessReport,
    Problem,
    check_dimensions,
    check_pairwise_disjoint,
)
from .subgradient import chain_subgradient, hub_subgradient


class Verdict(str, Enum):
    OPTIMAL_WITHIN_TOL = "optimal_within_tol"
    NOT_OPTIMAL = "not_optimal"
    INDETERMINATE = "indeterminate"


class VertexResidual(NamedTuple):
    """Force sum at one chain vertex and whether it was well defined."""

    vector: np.ndarray
    indeterminate: bool


def chain_residual(
    problem: Problem,
    config: Configuration,
    i: int,
    *,
    coincidence_threshold: float = COINCIDENCE_THRESHOLD,
) -> VertexResidual:
    """Equilibrium residual at chain vertex ``i``.

    Identical to the vertex subgradient in the non-degenerate case (shared
    implementation). The vertex is marked indeterminate when any of its
    three difference vectors (to the cyclic neighbors or to the hub) is
    shorter than the coincidence threshold; the returned vector then has the
    degenerate terms zeroed rather than guessed.
    """
    check_dimensions(problem, config)
    m = problem.m
    if not 0 <= i < m:
        raise InvalidInputError(f"vertex index {i} out of range for m={m}")
    pts = config.chain_points
    degenerate = any(
        norm(pts[i] - other) < coincidence_threshold
        for other in (pts[(i - 1) % m], pts[(i + 1) % m], config.hub_point)
    )
    vec = chain_subgradient(
        problem, config, i, coincidence_threshold=coincidence_threshold
    )
    return VertexResidual(vec, degenerate)


@dataclass(frozen=True)
class OptimalityReport:
    """Equilibrium residuals and normal-cone memberships at a candidate.

    ``chain_residuals`` stacks the per-vertex force sums; the normal vector
    tested for vertex i is the negated residual. ``global_balance_norm`` is
    the norm of the sum of all those normal vectors and stays at floating-
    point accumulation level whenever no vertex is indeterminate.
    ``disjoint_violations`` carries the pairwise set-distance diagnostic
    (the equilibrium characterization assumes pairwise disjoint sets), or
    None when that check was skipped.
    """

    chain_residuals: np.ndarray
    hub_residual: np.ndarray
    chain_normal_ok: tuple[bool, ...]
    hub_normal_ok: bool
    global_balance_norm: float
    verdict: Verdict
    indeterminate_vertices: tuple[int, ...]
    hub_indeterminate: bool
    tol: float
    disjointness: DisjointnessReport | None = None


def verify(
    problem: Problem,
    config: Configuration,
    tol: float = 1e-4,
    *,
    coincidence_threshold: float = COINCIDENCE_THRESHOLD,
    check_disjoint: bool = True,
) -> OptimalityReport:
    """Check the equilibrium conditions at ``config`` within tolerance ``tol``.

    ``config`` must be feasible within ``tol`` (raises
    :class:`InvalidInputError` otherwise). The default tolerance is loose
    relative to solver stagnation tolerances on purpose: subgradient methods
    stopped at stagnation epsilon typically leave equilibrium residuals of
    order sqrt(epsilon).

    Membership is tested on force-normalized residuals: each block's
    residual is divided by that block's total force budget (the sum of the
    weights feeding it: rho_{i-1} + rho_i + omega_i at vertex i, the omega
    sum at the hub) before the normal-cone test. Cone membership itself is
    scaling invariant; the normalization only makes ``tol`` read as a
    deviation per unit of pulling force, the same yardstick for every block
    regardless of its weights. The residual fields of the report stay
    unnormalized.
    """
    check_dimensions(problem, config)
    if tol <= 0:
        raise InvalidInputError(f"verification tolerance must be positive, got {tol}")
    pts = config.chain_points
    hub = config.hub_point
    for i, (s, p) in enumerate(zip(problem.chain_sets, pts)):
        if not s.contains(p, tol):
            raise InvalidInputError(
                f"chain point {i} is infeasible: distance {s.distance(p):.3e} > tol {tol:g}"
            )
    if not problem.hub_set.contains(hub, tol):
        raise InvalidInputError(
            f"hub point is infeasible: distance {problem.hub_set.distance(hub):.3e} > tol {tol:g}"
        )

    residuals = []
    flagged = []
    for i in range(problem.m):
        res = chain_residual(
            problem, config, i, coincidence_threshold=coincidence_threshold
        )
        residuals.append(res.vector)
        if res.indeterminate:
            flagged.append(i)
    chain_res = np.stack(residuals)

    hub_gaps = np.sqrt(((pts - hub) ** 2).sum(axis=1))
    hub_indeterminate = bool(np.any(hub_gaps < coincidence_threshold))
    hub_res = hub_subgradient(
        problem, config, coincidence_threshold=coincidence_threshold
    )

    chain_ok = tuple(
        bool(s.normal_cone_contains(p, -r, tol))
        for s, p, r in zip(problem.chain_sets, pts, chain_res)
    )
    hub_ok = bool(problem.hub_set.normal_cone_contains(hub, -hub_res, tol))

    balance = -(chain_res.sum(axis=0) + hub_res)
    if flagged or hub_indeterminate:
        verdict = Verdict.INDETERMINATE
    elif all(chain_ok) and hub_ok:
        verdict = Verdict.OPTIMAL_WITHIN_TOL
    else:
        verdict = Verdict.NOT_OPTIMAL

    return OptimalityReport(
        chain_residuals=chain_res,
        hub_residual=hub_res,
        chain_normal_ok=chain_ok,
        hub_normal_ok=hub_ok,
        global_balance_norm=norm(balance),
        verdict=verdict,
        indeterminate_vertices=tuple(flagged),
        hub_indeterminate=hub_indeterminate,
        tol=tol,
        disjointness=check_pairwise_disjoint(problem) if check_disjoint else None,
    )
