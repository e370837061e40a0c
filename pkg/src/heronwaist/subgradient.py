"""Closed-form subgradients of the chain-plus-hub objective.

The objective is a weighted sum of Euclidean norms, so a subgradient is
assembled from unit vectors of the pairwise differences. At a kink (two
points coincident) the norm's subdifferential contains 0, so any term with
a vanishing denominator may be replaced by the zero vector and the result
remains a valid subgradient. By default each term is zeroed independently,
which preserves the information carried by the non-degenerate terms;
``zero_whole_block=True`` switches to zeroing the entire vertex gradient as
soon as any of its denominators vanishes.

The composite subgradient norm never exceeds the explicit constant returned
by :func:`subgradient_bound`, which is what makes the diminishing-step
projected subgradient iteration stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .geometry import COINCIDENCE_THRESHOLD
from .problem import Configuration, Problem, check_dimensions


def _norms(rows: np.ndarray) -> np.ndarray:
    return np.sqrt((rows * rows).sum(axis=1))


def _units(rows: np.ndarray, threshold: float) -> np.ndarray:
    """Row-normalized directions; rows shorter than ``threshold`` become 0."""
    lengths = _norms(rows)
    out = np.zeros_like(rows)
    mask = lengths >= threshold
    out[mask] = rows[mask] / lengths[mask][:, None]
    return out


def _unit(vec: np.ndarray, threshold: float) -> np.ndarray:
    length = float(np.sqrt((vec * vec).sum()))
    if length < threshold:
        return np.zeros_like(vec)
    return vec / length


@dataclass(frozen=True, eq=False)
class SubgradientVector:
    """Per-block subgradient: one row per chain vertex plus the hub block."""

    chain_grads: np.ndarray  # (m, n)
    hub_grad: np.ndarray  # (n,)

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.chain_grads.ravel(), self.hub_grad])

    def norm(self) -> float:
        return float(
            np.sqrt((self.chain_grads * self.chain_grads).sum() + (self.hub_grad * self.hub_grad).sum())
        )


def chain_subgradient(
    problem: Problem,
    config: Configuration,
    i: int,
    *,
    coincidence_threshold: float = COINCIDENCE_THRESHOLD,
    zero_whole_block: bool = False,
) -> np.ndarray:
    """Subgradient block for chain vertex ``i`` (0-based, cyclic).

    Returns rho_{i-1} u(a_i - a_{i-1}) + rho_i u(a_i - a_{i+1})
    + omega_i u(a_i - x), where u() normalizes and maps near-zero
    differences to the zero vector. Its norm is at most
    rho_{i-1} + rho_i + omega_i.
    """
    check_dimensions(problem, config)
    m = problem.m
    if not 0 <= i < m:
        raise InvalidInputError(f"vertex index {i} out of range for m={m}")
    pts = config.chain_points
    d_prev = pts[i] - pts[(i - 1) % m]
    d_next = pts[i] - pts[(i + 1) % m]
    d_hub = pts[i] - config.hub_point
    if zero_whole_block:
        thr = coincidence_threshold
        for d in (d_prev, d_next, d_hub):
            if float(np.sqrt((d * d).sum())) < thr:
                return np.zeros(problem.n)
    rho = problem.rho
    return (
        rho[(i - 1) % m] * _unit(d_prev, coincidence_threshold)
        + rho[i] * _unit(d_next, coincidence_threshold)
        + problem.omega[i] * _unit(d_hub, coincidence_threshold)
    )


def hub_subgradient(
    problem: Problem,
    config: Configuration,
    *,
    coincidence_threshold: float = COINCIDENCE_THRESHOLD,
) -> np.ndarray:
    """Hub block: sum_i omega_i u(x - a_i), coincident terms zeroed.

    Its norm is at most sum_i omega_i.
    """
    check_dimensions(problem, config)
    to_hub = _units(config.chain_points - config.hub_point, coincidence_threshold)
    return -(problem.omega[:, None] * to_hub).sum(axis=0)


def full_subgradient(
    problem: Problem,
    config: Configuration,
    *,
    coincidence_threshold: float = COINCIDENCE_THRESHOLD,
    zero_whole_block: bool = False,
) -> SubgradientVector:
    """All chain blocks and the hub block, assembled in one vectorized pass."""
    check_dimensions(problem, config)
    pts = config.chain_points
    rho = problem.rho
    omega = problem.omega
    edge_d = pts - np.roll(pts, -1, axis=0)  # a_i - a_{i+1}
    hub_d = pts - config.hub_point
    edge_u = _units(edge_d, coincidence_threshold)
    hub_u = _units(hub_d, coincidence_threshold)
    # u(a_i - a_{i-1}) is the negated previous edge direction.
    prev_u = -np.roll(edge_u, 1, axis=0)
    chain = (
        np.roll(rho, 1)[:, None] * prev_u
        + rho[:, None] * edge_u
        + omega[:, None] * hub_u
    )
    if zero_whole_block:
        edge_n = _norms(edge_d)
        degenerate = (
            (np.roll(edge_n, 1) < coincidence_threshold)
            | (edge_n < coincidence_threshold)
            | (_norms(hub_d) < coincidence_threshold)
        )
        chain[degenerate] = 0.0
    hub = -(omega[:, None] * hub_u).sum(axis=0)
    return SubgradientVector(chain, hub)


def subgradient_bound(problem: Problem) -> float:
    """Uniform bound G on the composite subgradient norm.

    G = sqrt(m * [max_j (rho_j + rho_{j+1}) + max_j omega_j]^2
             + (sum_i omega_i)^2)

    with cyclic rho indexing. Every subgradient returned by
    :func:`full_subgradient`, at any configuration, has norm at most G.
    """
    rho = problem.rho
    omega = problem.omega
    per_vertex = float(np.max(rho + np.roll(rho, -1)) + np.max(omega))
    return float(np.sqrt(problem.m * per_vertex**2 + float(omega.sum()) ** 2))
