"""Projected subgradient descent with diminishing steps and best-iterate tracking.

Each iteration takes a subgradient step from the current point and projects
the result block by block onto the feasible product set, which is the exact
Euclidean projection because the feasible region is a Cartesian product.
Iteration counting starts at k = 1 (so the first harmonic step is
step_scale / 1) and iteration k maps the (k-1)-th iterate to the k-th.

The objective values of the best iterates converge to the optimum whenever
the step sizes satisfy sum alpha_k = inf and sum alpha_k^2 < inf, which
both harmonic rules do. Stopping is based on stagnation of consecutive
objective values, |J_k - J_{k-1}| < tolerance, with an optional small-
subgradient test. The returned configuration is the best iterate seen, not
the last one; subgradient steps are not monotone.

The core loop is deterministic: identical inputs produce bitwise-identical
iterates and traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidInputError, NumericalError, StructuralError
from .geometry import Ball, Box, COINCIDENCE_THRESHOLD, ConvexSet, MEMBERSHIP_TOL, Singleton
from .problem import (
    Configuration,
    Problem,
    check_dimensions,
    check_nondegeneracy,
)

# Stagnation tolerances whose first-hit iterations are always recorded.
CHECKPOINT_TOLERANCES = (1e-4, 1e-6, 1e-8, 1e-10, 1e-12)

# Dense trace up to this many iterations, geometric thinning beyond.
_TRACE_DENSE_LIMIT = 10_000


class StepRule(str, Enum):
    HARMONIC = "harmonic"            # step_scale / k
    HARMONIC_OFFSET = "harmonic_offset"  # step_scale / (k + step_offset)
    SQRT_DECAY = "sqrt_decay"        # step_scale / sqrt(k); diagnostic only


class StopReason(str, Enum):
    OBJECTIVE_STAGNATION = "objective_stagnation"
    GRADIENT_SMALL = "gradient_small"
    MAX_ITER = "max_iter"


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls.

    The harmonic rules satisfy the classical diminishing-step conditions.
    ``sqrt_decay`` violates the square-summability condition and is kept
    only for diagnostics; it is never the default. ``stop_on_gradient``
    additionally stops when the subgradient norm drops below the tolerance,
    which rarely triggers for nonsmooth problems and is off by default.
    """

    step_rule: StepRule = StepRule.HARMONIC
    step_scale: float = 1.0
    step_offset: int = 0
    tolerance: float = 1e-12
    max_iter: int = 10_000_000
    stop_on_gradient: bool = False
    trace_stride: int = 1

    def __post_init__(self):
        object.__setattr__(self, "step_rule", StepRule(self.step_rule))
        if not (self.step_scale > 0 and math.isfinite(self.step_scale)):
            raise InvalidInputError(f"step_scale must be positive, got {self.step_scale}")
        if self.step_offset < 0:
            raise InvalidInputError(f"step_offset must be nonnegative, got {self.step_offset}")
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise InvalidInputError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iter < 1:
            raise InvalidInputError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.trace_stride < 1:
            raise InvalidInputError(f"trace_stride must be at least 1, got {self.trace_stride}")


class TraceRecord(NamedTuple):
    """One recorded iteration: k, J_k, best J so far, step used, subgradient norm."""

    k: int
    objective: float
    best_objective: float
    step: float
    grad_norm: float


@dataclass(frozen=True)
class SolveResult:
    best_config: Configuration
    best_objective: float
    iterations: int
    stop_reason: StopReason
    trace: list[TraceRecord]
    checkpoints: dict[float, int]
    init_projected: bool


def step_size(config: SolverConfig, k: int) -> float:
    """Step length for iteration k >= 1 under the configured rule."""
    if k < 1:
        raise InvalidInputError(f"iteration index must be >= 1, got {k}")
    if config.step_rule is StepRule.HARMONIC:
        return config.step_scale / k
    if config.step_rule is StepRule.HARMONIC_OFFSET:
        return config.step_scale / (k + config.step_offset)
    return config.step_scale / math.sqrt(k)


def _chain_projector(sets: tuple[ConvexSet, ...]) -> Callable[[np.ndarray], np.ndarray]:
    """Stacked projector for the chain blocks.

    Homogeneous set kinds project all rows in one vectorized pass; the
    generic fallback projects row by row. Both compute the exact product
    projection with identical floating-point results.
    """
    if all(isinstance(s, Ball) for s in sets):
        centers = np.array([s.center for s in sets])
        radii = np.array([s.radius for s in sets])

        def project_balls(pts):
            d = pts - centers
            lengths = np.sqrt((d * d).sum(axis=1))
            out = pts.copy()
            outside = lengths > radii
            out[outside] = centers[outside] + d[outside] * (radii[outside] / lengths[outside])[:, None]
            return out

        return project_balls

    if all(isinstance(s, Box) for s in sets):
        lower = np.array([s.lower for s in sets])
        upper = np.array([s.upper for s in sets])
        return lambda pts: np.clip(pts, lower, upper)

    if all(isinstance(s, Singleton) for s in sets):
        points = np.array([s.point for s in sets])
        return lambda pts: points.copy()

    def project_rows(pts):
        return np.stack([s.project(p) for s, p in zip(sets, pts)])

    return project_rows


def project_feasible(problem: Problem, config: Configuration) -> Configuration:
    """Blockwise Euclidean projection onto C_1 x ... x C_m x S.

    Because the feasible region is a Cartesian product, projecting each
    block independently is the exact projection of the composite vector.
    """
    check_dimensions(problem, config)
    chain_proj = _chain_projector(problem.chain_sets)
    return Configuration(
        chain_proj(config.chain_points),
        problem.hub_set.project(config.hub_point),
    )


def initialize(problem: Problem, guess: Configuration | None = None) -> Configuration:
    """Feasible starting configuration.

    With a guess, returns its feasible projection (a feasible guess is
    returned unchanged). Without one, uses each set's anchor point: ball
    and box centers, singleton points, the hub halfspace's boundary
    projection of the origin.
    """
    if guess is not None:
        return project_feasible(problem, guess)
    return Configuration(
        np.stack([s.anchor() for s in problem.chain_sets]),
        problem.hub_set.anchor(),
    )


def _is_feasible(problem: Problem, config: Configuration, tol: float) -> bool:
    return all(
        s.distance(p) <= tol for s, p in zip(problem.chain_sets, config.chain_points)
    ) and problem.hub_set.distance(config.hub_point) <= tol


def _record_stride(k: int, trace_stride: int) -> int:
    dense = _TRACE_DENSE_LIMIT * trace_stride
    return trace_stride * max(1, -(-k // dense))  # ceil division


def solve(problem: Problem, init: Configuration, config: SolverConfig | None = None) -> SolveResult:
    """Run projected subgradient descent from ``init``.

    ``init`` is projected onto the feasible set first if needed (recorded in
    ``init_projected``). Raises :class:`StructuralError` when the problem
    has decoupled vertices and :class:`NumericalError`, with the partial
    trace attached, if the objective ever becomes non-finite.
    """
    cfg = config or SolverConfig()
    bad = check_nondegeneracy(problem)
    if bad:
        raise StructuralError(
            f"cannot solve: decoupled chain vertices {bad} (zero rho and omega around them)"
        )
    check_dimensions(problem, init)

    init_projected = not _is_feasible(problem, init, MEMBERSHIP_TOL)
    if init_projected:
        init = project_feasible(problem, init)

    pts = init.chain_points.copy()
    hub = init.hub_point.copy()
    rho = problem.rho
    omega = problem.omega
    rho_prev = np.roll(rho, 1)
    rho_col = rho[:, None]
    rho_prev_col = rho_prev[:, None]
    omega_col = omega[:, None]
    thr = COINCIDENCE_THRESHOLD
    chain_proj = _chain_projector(problem.chain_sets)
    hub_proj = problem.hub_set.project

    def evaluate(pts, hub):
        edge_d = pts - np.roll(pts, -1, axis=0)
        hub_d = pts - hub
        edge_n = np.sqrt((edge_d * edge_d).sum(axis=1))
        hub_n = np.sqrt((hub_d * hub_d).sum(axis=1))
        value = float(np.sum(rho * edge_n) + np.sum(omega * hub_n))
        return value, edge_d, edge_n, hub_d, hub_n

    j_prev, edge_d, edge_n, hub_d, hub_n = evaluate(pts, hub)
    j_best = j_prev
    best_pts = pts.copy()
    best_hub = hub.copy()

    trace: list[TraceRecord] = []
    checkpoints: dict[float, int] = {}
    pending = [t for t in CHECKPOINT_TOLERANCES]
    stop_reason = StopReason.MAX_ITER
    iterations = cfg.max_iter

    for k in range(1, cfg.max_iter + 1):
        # Subgradient at the current point, reusing the cached differences.
        edge_u = np.zeros_like(edge_d)
        mask = edge_n >= thr
        edge_u[mask] = edge_d[mask] / edge_n[mask][:, None]
        hub_u = np.zeros_like(hub_d)
        mask = hub_n >= thr
        hub_u[mask] = hub_d[mask] / hub_n[mask][:, None]
        g_chain = rho_prev_col * -np.roll(edge_u, 1, axis=0) + rho_col * edge_u + omega_col * hub_u
        g_hub = -(omega_col * hub_u).sum(axis=0)
        g_norm = float(np.sqrt((g_chain * g_chain).sum() + (g_hub * g_hub).sum()))

        alpha = step_size(cfg, k)
        pts = chain_proj(pts - alpha * g_chain)
        hub = hub_proj(hub - alpha * g_hub)

        j_new, edge_d, edge_n, hub_d, hub_n = evaluate(pts, hub)
        if not math.isfinite(j_new):
            raise NumericalError(
                f"objective became non-finite at iteration {k}", trace=trace
            )
        if j_new < j_best:
            j_best = j_new
            best_pts = pts.copy()
            best_hub = hub.copy()

        delta = abs(j_new - j_prev)
        while pending and delta < pending[0]:
            checkpoints[pending.pop(0)] = k

        stop = None
        if cfg.stop_on_gradient and g_norm < cfg.tolerance:
            stop = StopReason.GRADIENT_SMALL
        elif delta < cfg.tolerance:
            stop = StopReason.OBJECTIVE_STAGNATION

        final = stop is not None or k == cfg.max_iter
        if final or k % _record_stride(k, cfg.trace_stride) == 0:
            trace.append(TraceRecord(k, j_new, j_best, alpha, g_norm))
        if stop is not None:
            stop_reason = stop
            iterations = k
            break
        j_prev = j_new

    return SolveResult(
        best_config=Configuration(best_pts, best_hub),
        best_objective=j_best,
        iterations=iterations,
        stop_reason=stop_reason,
        trace=trace,
        checkpoints=checkpoints,
        init_projected=init_projected,
    )


def multi_start(
    problem: Problem,
    config: SolverConfig | None = None,
    runs: int = 4,
    seed: int = 0,
    spread: float = 1.0,
) -> tuple[SolveResult, list[SolveResult]]:
    """Independent solves from perturbed anchor configurations.

    Run 0 starts exactly at the anchors; later runs perturb them with
    seeded Gaussian noise of scale ``spread`` before projecting back onto
    the feasible set. Returns the winner (lowest best objective, earliest
    run on ties) along with all results. Deterministic for a fixed seed.
    """
    if runs < 1:
        raise InvalidInputError(f"runs must be at least 1, got {runs}")
    rng = np.random.default_rng(seed)
    base = initialize(problem)
    results = []
    for r in range(runs):
        if r == 0:
            start = base
        else:
            start = project_feasible(
                problem,
                Configuration(
                    base.chain_points + spread * rng.standard_normal(base.chain_points.shape),
                    base.hub_point + spread * rng.standard_normal(base.hub_point.shape),
                ),
            )
        results.append(solve(problem, start, config))
    winner = min(range(runs), key=lambda r: (results[r].best_objective, r))
    return results[winner], results
