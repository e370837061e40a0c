"""Problem definition, objective evaluation and structural diagnostics.

A problem couples m chain sets C_1..C_m, a hub set S, and two nonnegative
weight vectors: rho weighs the closed-chain edges ||a_i - a_{i+1}|| and
omega weighs the radial connections ||a_i - x|| to the hub point x. The
objective

    J(a, x) = sum_i rho_i ||a_i - a_{i+1}|| + sum_i omega_i ||a_i - x||

is convex on all of R^(n(m+1)); feasibility (a_i in C_i, x in S) is handled
separately by the solver's projections. Indices are 0-based throughout and
cyclic, so vertex 0's predecessor is vertex m-1 and rho[m-1] weighs the
closing edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, StructuralError
from .geometry import ConvexSet, set_distance


def _norms(rows: np.ndarray) -> np.ndarray:
    return np.sqrt((rows * rows).sum(axis=1))


@dataclass(frozen=True, eq=False)
class Weights:
    """Nonnegative edge weights (rho) and radial weights (omega), length m each."""

    rho: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        omega = np.asarray(self.omega, dtype=float)
        for name, arr in (("rho", rho), ("omega", omega)):
            if arr.ndim != 1:
                raise InvalidInputError(f"{name} must be a flat list of weights")
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"{name} contains non-finite entries")
            if np.any(arr < 0):
                raise InvalidInputError(f"{name} contains negative entries")
        if rho.size != omega.size:
            raise InvalidInputError(
                f"rho and omega must have equal length, got {rho.size} and {omega.size}"
            )
        rho = rho.copy()
        omega = omega.copy()
        rho.flags.writeable = False
        omega.flags.writeable = False
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "omega", omega)

    def __len__(self):
        return self.rho.size

    def __eq__(self, other):
        if not isinstance(other, Weights):
            return NotImplemented
        return np.array_equal(self.rho, other.rho) and np.array_equal(self.omega, other.omega)

    def scaled(self, factor: float) -> "Weights":
        return Weights(self.rho * factor, self.omega * factor)


@dataclass(frozen=True, eq=False)
class Problem:
    """A chain-with-hub instance: m chain sets, one hub set, weights.

    By default at least three chain sets are required, since a closed chain
    on two vertices counts the single geometric edge twice (once via rho_1
    and once via rho_2). Pass ``allow_short_chain=True`` to permit m = 2
    with the summation formula applied literally.

    Construction does not require the coupling ("nondegeneracy") assumption
    rho_{k-1} + rho_k + omega_k > 0; use :func:`check_nondegeneracy` to
    diagnose it. The solver refuses problems that violate it.
    """

    chain_sets: tuple[ConvexSet, ...]
    hub_set: ConvexSet
    weights: Weights
    allow_short_chain: bool = field(default=False, compare=False)

    def __post_init__(self):
        chain = tuple(self.chain_sets)
        if not chain:
            raise InvalidInputError("at least one chain set is required")
        object.__setattr__(self, "chain_sets", chain)
        m_min = 2 if self.allow_short_chain else 3
        if len(chain) < m_min:
            raise InvalidInputError(
                f"a closed chain needs at least {m_min} vertices, got {len(chain)}"
            )
        n = chain[0].dim
        for i, c in enumerate(chain):
            if c.dim != n:
                raise InvalidInputError(
                    f"chain set {i} has dimension {c.dim}, expected {n}"
                )
        if self.hub_set.dim != n:
            raise InvalidInputError(
                f"hub set has dimension {self.hub_set.dim}, expected {n}"
            )
        if len(self.weights) != len(chain):
            raise InvalidInputError(
                f"weights have length {len(self.weights)} but there are {len(chain)} chain sets"
            )

    @property
    def m(self) -> int:
        return len(self.chain_sets)

    @property
    def n(self) -> int:
        return self.chain_sets[0].dim

    @property
    def rho(self) -> np.ndarray:
        return self.weights.rho

    @property
    def omega(self) -> np.ndarray:
        return self.weights.omega

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        return (
            self.chain_sets == other.chain_sets
            and self.hub_set == other.hub_set
            and self.weights == other.weights
        )


@dataclass(frozen=True, eq=False)
class Configuration:
    """A candidate placement: m chain points stacked as an (m, n) array plus
    the hub point. Not necessarily feasible."""

    chain_points: np.ndarray
    hub_point: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.chain_points, dtype=float)
        hub = np.asarray(self.hub_point, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InvalidInputError(
                f"chain_points must be an (m, n) array, got shape {pts.shape}"
            )
        if hub.ndim != 1 or hub.size != pts.shape[1]:
            raise InvalidInputError(
                f"hub_point must be a length-{pts.shape[1]} vector, got shape {hub.shape}"
            )
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(hub))):
            raise InvalidInputError("configuration contains non-finite coordinates")
        pts = pts.copy()
        hub = hub.copy()
        pts.flags.writeable = False
        hub.flags.writeable = False
        object.__setattr__(self, "chain_points", pts)
        object.__setattr__(self, "hub_point", hub)

    @property
    def m(self) -> int:
        return self.chain_points.shape[0]

    @property
    def n(self) -> int:
        return self.chain_points.shape[1]

    def flatten(self) -> np.ndarray:
        """Composite decision vector (a_1, ..., a_m, x) of length n*(m+1)."""
        return np.concatenate([self.chain_points.ravel(), self.hub_point])

    @classmethod
    def from_flat(cls, vec, m: int, n: int) -> "Configuration":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (n * (m + 1),):
            raise InvalidInputError(
                f"flat configuration must have length {n * (m + 1)}, got {vec.shape}"
            )
        return cls(vec[: m * n].reshape(m, n), vec[m * n :])

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return np.array_equal(self.chain_points, other.chain_points) and np.array_equal(
            self.hub_point, other.hub_point
        )


def check_dimensions(problem: Problem, config: Configuration) -> None:
    """Raise :class:`InvalidInputError` unless config matches the problem shape."""
    if config.m != problem.m or config.n != problem.n:
        raise InvalidInputError(
            f"configuration has shape (m={config.m}, n={config.n}), "
            f"problem expects (m={problem.m}, n={problem.n})"
        )


def objective(problem: Problem, config: Configuration) -> float:
    """Weighted perimeter plus weighted radial cost of a configuration.

    Defined for any dimensionally consistent configuration, feasible or not.
    """
    check_dimensions(problem, config)
    pts = config.chain_points
    edge_norms = _norms(pts - np.roll(pts, -1, axis=0))
    hub_norms = _norms(pts - config.hub_point)
    return float(np.sum(problem.rho * edge_norms) + np.sum(problem.omega * hub_norms))


def check_nondegeneracy(problem: Problem) -> list[int]:
    """Vertices k with rho_{k-1} + rho_k + omega_k == 0 (cyclic; 0-based).

    An empty list means every chain variable is coupled to the objective.
    A flagged vertex is completely decoupled: the objective does not depend
    on it, and no balancing force determines its location.
    """
    rho = problem.rho
    rho_prev = np.roll(rho, 1)
    total = rho_prev + rho + problem.omega
    return [int(k) for k in np.nonzero(total == 0.0)[0]]


@dataclass(frozen=True)
class Component:
    """A maximal run of chain vertices linked by positive edge weights.

    ``indices`` follow the chain order (0-based). ``includes_hub`` is set
    when some member has a positive radial weight; the hub is shared between
    all components that reach it.
    """

    indices: tuple[int, ...]
    includes_hub: bool


def connected_components(problem: Problem) -> list[Component]:
    """Partition the chain vertices into connectivity components.

    Vertices i and i+1 (cyclically) are linked iff rho_i > 0; linking is
    treated as undirected. Requires nondegeneracy, otherwise a vertex could
    be entirely isolated.
    """
    bad = check_nondegeneracy(problem)
    if bad:
        raise StructuralError(
            f"decoupled chain vertices {bad}: rho and omega sums vanish there"
        )
    m = problem.m
    rho = problem.rho
    omega = problem.omega

    if np.all(rho > 0):
        comps = [list(range(m))]
    else:
        # Cut the cycle at every zero-weight edge; each arc is a component.
        starts = [i for i in range(m) if rho[(i - 1) % m] == 0.0]
        comps = []
        for s in starts:
            run = [s]
            while rho[run[-1]] > 0:
                run.append((run[-1] + 1) % m)
            comps.append(run)
        comps.sort(key=lambda run: min(run))

    return [
        Component(tuple(run), bool(any(omega[k] > 0 for k in run)))
        for run in comps
    ]


class ComponentCheck(NamedTuple):
    component: Component
    satisfied: bool


@dataclass(frozen=True)
class ExistenceReport:
    """Per-component boundedness diagnostic for solution existence.

    A component that reaches the hub needs the hub set or one of its chain
    sets bounded; a hub-free component needs one of its chain sets bounded.
    ``satisfied`` is the overall verdict.
    """

    checks: tuple[ComponentCheck, ...]
    satisfied: bool


def check_existence(problem: Problem) -> ExistenceReport:
    """Check the boundedness preconditions for an optimal solution to exist."""
    checks = []
    for comp in connected_components(problem):
        chain_bounded = any(problem.chain_sets[k].is_bounded() for k in comp.indices)
        if comp.includes_hub:
            ok = chain_bounded or problem.hub_set.is_bounded()
        else:
            ok = chain_bounded
        checks.append(ComponentCheck(comp, ok))
    return ExistenceReport(tuple(checks), all(c.satisfied for c in checks))


class PairDistance(NamedTuple):
    """Distance between two constraint sets; ``None`` denotes the hub set."""

    first: int | None
    second: int | None
    distance: float


def pair_label(index: int | None) -> str:
    """Human-readable name for a constraint set index (1-based C_i, or S)."""
    return "S" if index is None else f"C{index + 1}"


@dataclass(frozen=True)
class DisjointnessReport:
    """Pairs of constraint sets closer than ``margin`` apart.

    An empty ``flagged`` tuple means the pairwise-disjointness hypothesis of
    the equilibrium characterization plausibly holds at this margin. This is
    a heuristic proxy: it does not verify the stronger separation property
    that each chain set avoids the convex hull of all the others.
    """

    flagged: tuple[PairDistance, ...]
    margin: float

    @property
    def ok(self) -> bool:
        return not self.flagged


def check_pairwise_disjoint(problem: Problem, margin: float = 0.0) -> DisjointnessReport:
    """Flag every pair of constraint sets (chain-chain and chain-hub) whose
    set distance is at most ``margin``."""
    if margin < 0:
        raise InvalidInputError("margin must be nonnegative")
    flagged = []
    sets = list(problem.chain_sets)
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            d = set_distance(sets[i], sets[j])
            if d <= margin:
                flagged.append(PairDistance(i, j, d))
        d = set_distance(sets[i], problem.hub_set)
        if d <= margin:
            flagged.append(PairDistance(i, None, d))
    return DisjointnessReport(tuple(flagged), margin)
