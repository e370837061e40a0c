"""Closed convex set primitives with exact Euclidean projections.

Four set shapes are supported: balls, axis-aligned boxes, halfspaces and
singletons. Each has a closed-form projection, which makes distances,
membership tests and normal-cone membership tests exact up to floating
point. All sets are immutable after construction and every operation is
pure, so values can be shared freely between threads.

Points are plain 1-D ``float64`` numpy arrays.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

# Absolute membership tolerance for unit-scale geometry in double precision.
MEMBERSHIP_TOL = 1e-12
# Default angular tolerance for normal-cone membership tests.
ANGULAR_TOL = 1e-9
# Below this length two points are treated as coincident.
COINCIDENCE_THRESHOLD = 1e-15

# Alternating-projection controls for set_distance.
_AP_MAX_ITER = 10_000
_AP_IMPROVEMENT = 1e-12
_AP_ZERO_FLOOR = 1e-9


def as_point(value, dim: int | None = None, name: str = "point") -> np.ndarray:
    """Validate and normalize a point to a read-only 1-D float64 array.

    Raises :class:`InvalidInputError` on non-finite entries, wrong shape,
    or (when ``dim`` is given) a dimension mismatch.
    """
    arr = np.asarray(value, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidInputError(f"{name} must be a 1-D coordinate vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite coordinates: {arr}")
    if dim is not None and arr.size != dim:
        raise InvalidInputError(f"{name} has dimension {arr.size}, expected {dim}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def norm(v: np.ndarray) -> float:
    """Euclidean norm, computed as sqrt(sum of squares) for a consistent
    floating-point evaluation order across the package."""
    return float(np.sqrt((v * v).sum()))


class ConvexSet(abc.ABC):
    """A nonempty closed convex subset of R^n."""

    @property
    @abc.abstractmethod
    def dim(self) -> int:
        """Ambient dimension n."""

    @abc.abstractmethod
    def project(self, x) -> np.ndarray:
        """Euclidean projection of ``x`` onto the set (the unique closest point)."""

    @abc.abstractmethod
    def is_bounded(self) -> bool:
        """Whether the set is bounded."""

    @abc.abstractmethod
    def anchor(self) -> np.ndarray:
        """A deterministic representative point of the set.

        Used to seed initial configurations and alternating projections:
        the center for balls and boxes, the point itself for singletons,
        and the boundary projection of the origin for halfspaces.
        """

    def distance(self, x) -> float:
        """Euclidean distance from ``x`` to the set; zero iff ``x`` is a member."""
        x = as_point(x, self.dim)
        return norm(x - self.project(x))

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        """Membership within an absolute distance tolerance."""
        if tol < 0:
            raise InvalidInputError("tolerance must be nonnegative")
        return self.distance(x) <= tol

    def normal_cone_contains(self, x, v, tol: float = ANGULAR_TOL) -> bool:
        """Decide whether ``v`` lies in the normal cone to the set at ``x``.

        ``x`` must be a member of the set within ``max(tol, MEMBERSHIP_TOL)``,
        otherwise :class:`InvalidInputError` is raised. At interior points the
        normal cone is {0}, so only ``norm(v) <= tol`` passes. On the boundary
        the test is shape specific: radial direction for balls, active-face
        sign conditions for boxes, the outward normal ray for halfspaces.
        Singletons accept every vector. The zero vector is accepted
        everywhere.

        ``tol`` plays three roles, all at the same resolution: boundary/face
        activation distance, angular deviation for ray cones, and absolute
        component bounds for box cones.
        """
        x = as_point(x, self.dim, "x")
        v = as_point(v, self.dim, "v")
        if tol < 0:
            raise InvalidInputError("tolerance must be nonnegative")
        btol = max(tol, MEMBERSHIP_TOL)
        if not self.contains(x, btol):
            raise InvalidInputError(
                f"normal cone queried at a point outside the set (distance {self.distance(x):.3e})"
            )
        return self._normal_cone_contains(x, v, tol, btol)

    @abc.abstractmethod
    def _normal_cone_contains(self, x, v, tol, btol) -> bool:
        ...

    def __hash__(self):
        return hash((type(self).__name__,) + tuple(self._key()))

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self._key(), other._key()))

    @abc.abstractmethod
    def _key(self) -> tuple:
        ...


def _ray_cone_test(v: np.ndarray, direction: np.ndarray, tol: float) -> bool:
    """Membership of v in the ray cone {t*direction : t >= 0}, relative angular tol."""
    nv = norm(v)
    if nv <= tol:
        return True
    s = float(v @ direction)
    perp = v - max(s, 0.0) * direction
    return norm(perp) <= tol * nv


@dataclass(frozen=True, eq=False, repr=False)
class Ball(ConvexSet):
    """Closed Euclidean ball {y : ||y - center|| <= radius}, radius > 0."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center, name="center"))
        r = float(self.radius)
        if not np.isfinite(r) or r <= 0:
            raise InvalidInputError(f"ball radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self):
        return self.center.size

    def project(self, x):
        x = as_point(x, self.dim)
        d = x - self.center
        r = norm(d)
        if r <= self.radius:
            return x
        return self.center + d * (self.radius / r)

    def is_bounded(self):
        return True

    def anchor(self):
        return self.center

    def _normal_cone_contains(self, x, v, tol, btol):
        d = x - self.center
        r = norm(d)
        if self.radius - r > btol or r <= COINCIDENCE_THRESHOLD:
            return norm(v) <= tol  # interior point: cone is {0}
        return _ray_cone_test(v, d / r, tol)

    def _key(self):
        return (self.center, np.float64(self.radius))

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


@dataclass(frozen=True, eq=False, repr=False)
class Box(ConvexSet):
    """Axis-aligned box {y : |y_i - center_i| <= half_widths_i}, half widths > 0."""

    center: np.ndarray
    half_widths: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center, name="center"))
        hw = as_point(self.half_widths, self.center.size, name="half_widths")
        if not np.all(hw > 0):
            raise InvalidInputError(f"box half widths must all be positive, got {hw.tolist()}")
        object.__setattr__(self, "half_widths", hw)

    @property
    def dim(self):
        return self.center.size

    @property
    def lower(self):
        return self.center - self.half_widths

    @property
    def upper(self):
        return self.center + self.half_widths

    def project(self, x):
        x = as_point(x, self.dim)
        return np.clip(x, self.lower, self.upper)

    def is_bounded(self):
        return True

    def anchor(self):
        return self.center

    def _normal_cone_contains(self, x, v, tol, btol):
        # Componentwise: the cone decomposes per coordinate into
        # R+ (upper face active), R- (lower face), or {0} (no face).
        hi_active = (self.upper - x) <= btol
        lo_active = (x - self.lower) <= btol
        for i in range(self.dim):
            if hi_active[i] and lo_active[i]:
                continue  # both faces within tolerance: any sign acceptable
            if hi_active[i]:
                if v[i] < -tol:
                    return False
            elif lo_active[i]:
                if v[i] > tol:
                    return False
            elif abs(v[i]) > tol:
                return False
        return True

    def _key(self):
        return (self.center, self.half_widths)

    def __repr__(self):
        return f"Box(center={self.center.tolist()}, half_widths={self.half_widths.tolist()})"


@dataclass(frozen=True, eq=False, repr=False)
class HalfSpace(ConvexSet):
    """Closed halfspace {y : <normal, y> <= offset}, with nonzero normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", as_point(self.normal, name="normal"))
        if norm(self.normal) == 0.0:
            raise InvalidInputError("halfspace normal must be nonzero")
        b = float(self.offset)
        if not np.isfinite(b):
            raise InvalidInputError(f"halfspace offset must be finite, got {self.offset}")
        object.__setattr__(self, "offset", b)

    @property
    def dim(self):
        return self.normal.size

    def project(self, x):
        x = as_point(x, self.dim)
        a = self.normal
        excess = float(a @ x) - self.offset
        if excess <= 0:
            return x
        return x - a * (excess / float(a @ a))

    def is_bounded(self):
        return False

    def anchor(self):
        a = self.normal
        return a * (self.offset / float(a @ a))

    def _normal_cone_contains(self, x, v, tol, btol):
        a = self.normal
        na = norm(a)
        slack = (self.offset - float(a @ x)) / na
        if slack > btol:
            return norm(v) <= tol  # strictly inside
        return _ray_cone_test(v, a / na, tol)

    def _key(self):
        return (self.normal, np.float64(self.offset))

    def __repr__(self):
        return f"HalfSpace(normal={self.normal.tolist()}, offset={self.offset})"


@dataclass(frozen=True, eq=False, repr=False)
class Singleton(ConvexSet):
    """One-point set {point}. Its normal cone is all of R^n."""

    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", as_point(self.point, name="point"))

    @property
    def dim(self):
        return self.point.size

    def project(self, x):
        as_point(x, self.dim)
        return self.point

    def is_bounded(self):
        return True

    def anchor(self):
        return self.point

    def _normal_cone_contains(self, x, v, tol, btol):
        return True

    def _key(self):
        return (self.point,)

    def __repr__(self):
        return f"Singleton(point={self.point.tolist()})"


def set_distance(first: ConvexSet, second: ConvexSet) -> float:
    """Distance between two convex sets, inf over ||a - b||.

    Ball pairs use the closed form. Every other pair runs alternating
    projections, which converge for convex sets; iteration stops when the
    per-step improvement drops below 1e-12 or after 10,000 rounds. Gaps
    below 1e-9 are reported as exactly 0 (intersecting or touching sets).
    """
    if first.dim != second.dim:
        raise InvalidInputError(
            f"sets live in different dimensions ({first.dim} vs {second.dim})"
        )
    if isinstance(first, Ball) and isinstance(second, Ball):
        gap = norm(first.center - second.center) - first.radius - second.radius
        return max(0.0, gap)

    p = first.anchor()
    q = second.project(p)
    gap = norm(p - q)
    for _ in range(_AP_MAX_ITER):
        p = first.project(q)
        q = second.project(p)
        new_gap = norm(p - q)
        if gap - new_gap < _AP_IMPROVEMENT:
            gap = min(gap, new_gap)
            break
        gap = new_gap
    return 0.0 if gap <= _AP_ZERO_FLOOR else gap
