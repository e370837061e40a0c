"""Static SVG rendering of planar configurations.

Draws the constraint sets in outline, the closed chain polygon, dashed rays
from the hub to each vertex, and labeled points. Output bytes are a pure
function of the inputs (fixed float formatting, no timestamps), so renders
can be compared and cached. Only two dimensions are supported; higher-
dimensional configurations export as a coordinate/edge table instead, see
:func:`write_coordinates_table`.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedDimensionError
from .geometry import Ball, Box, HalfSpace, Singleton
from .problem import Configuration, Problem, check_dimensions
from .specio import _atomic_write

_STYLE = (
    "  <style>\n"
    "    .set { fill: none; stroke: #4466aa; stroke-width: 0.04; }\n"
    "    .chain { fill: none; stroke: #202020; stroke-width: 0.05; }\n"
    "    .ray { stroke: #aa4444; stroke-width: 0.03; stroke-dasharray: 0.15 0.1; }\n"
    "    .pt { fill: #202020; }\n"
    "    .hubpt { fill: #aa4444; }\n"
    "    text { font-family: sans-serif; font-size: 0.45px; fill: #333333; }\n"
    "  </style>\n"
)


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _bounds(problem: Problem, config: Configuration):
    lo = np.array([np.inf, np.inf])
    hi = -lo
    def include(points):
        nonlocal lo, hi
        pts = np.atleast_2d(points)
        lo = np.minimum(lo, pts.min(axis=0))
        hi = np.maximum(hi, pts.max(axis=0))

    for s in (*problem.chain_sets, problem.hub_set):
        if isinstance(s, Ball):
            include([s.center - s.radius, s.center + s.radius])
        elif isinstance(s, Box):
            include([s.lower, s.upper])
        elif isinstance(s, Singleton):
            include([s.point])
        # Halfspaces are unbounded; their boundary line is clipped later.
    include(config.chain_points)
    include([config.hub_point])
    pad = 0.08 * float(max(hi - lo)) + 0.5
    return lo - pad, hi + pad


def _halfspace_segment(s: HalfSpace, lo, hi):
    """Clip the boundary line <normal, y> = offset to the view rectangle."""
    a, b = s.normal, s.offset
    base = a * (b / float(a @ a))
    t = np.array([-a[1], a[0]])
    t = t / np.sqrt(float(t @ t))
    span = 2.0 * float(np.sqrt(((hi - lo) ** 2).sum()))
    return base - span * t, base + span * t


def render_svg(problem: Problem, config: Configuration, out_path) -> None:
    """Write a deterministic SVG picture of a planar configuration.

    Raises :class:`UnsupportedDimensionError` unless the problem is 2-D.
    """
    check_dimensions(problem, config)
    if problem.n != 2:
        raise UnsupportedDimensionError(
            f"SVG rendering is only available in 2 dimensions, got n={problem.n}; "
            "use write_coordinates_table for a data export"
        )
    lo, hi = _bounds(problem, config)
    width, height = hi - lo

    # SVG y grows downward; flip world y.
    def sx(p):
        return _fmt(p[0])

    def sy(p):
        return _fmt(-p[1])

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(lo[0])} {_fmt(-hi[1])} {_fmt(width)} {_fmt(height)}">\n',
        _STYLE,
    ]

    for s in (*problem.chain_sets, problem.hub_set):
        if isinstance(s, Ball):
            parts.append(
                f'  <circle class="set" cx="{sx(s.center)}" cy="{sy(s.center)}" '
                f'r="{_fmt(s.radius)}"/>\n'
            )
        elif isinstance(s, Box):
            w, h = s.upper - s.lower
            parts.append(
                f'  <rect class="set" x="{_fmt(s.lower[0])}" y="{_fmt(-s.upper[1])}" '
                f'width="{_fmt(w)}" height="{_fmt(h)}"/>\n'
            )
        elif isinstance(s, HalfSpace):
            p1, p2 = _halfspace_segment(s, lo, hi)
            parts.append(
                f'  <line class="set" x1="{sx(p1)}" y1="{sy(p1)}" '
                f'x2="{sx(p2)}" y2="{sy(p2)}"/>\n'
            )
        elif isinstance(s, Singleton):
            parts.append(
                f'  <circle class="set" cx="{sx(s.point)}" cy="{sy(s.point)}" r="0.08"/>\n'
            )

    ring = " ".join(f"{sx(p)},{sy(p)}" for p in config.chain_points)
    parts.append(f'  <polygon class="chain" points="{ring}"/>\n')

    hub = config.hub_point
    for p in config.chain_points:
        parts.append(
            f'  <line class="ray" x1="{sx(hub)}" y1="{sy(hub)}" x2="{sx(p)}" y2="{sy(p)}"/>\n'
        )

    for i, p in enumerate(config.chain_points):
        parts.append(f'  <circle class="pt" cx="{sx(p)}" cy="{sy(p)}" r="0.09"/>\n')
        parts.append(f'  <text x="{_fmt(p[0] + 0.15)}" y="{_fmt(-p[1] - 0.15)}">a{i + 1}</text>\n')
    parts.append(f'  <circle class="hubpt" cx="{sx(hub)}" cy="{sy(hub)}" r="0.11"/>\n')
    parts.append(f'  <text x="{_fmt(hub[0] + 0.15)}" y="{_fmt(-hub[1] - 0.15)}">x</text>\n')
    parts.append("</svg>\n")
    _atomic_write(out_path, "".join(parts))


def write_coordinates_table(problem: Problem, config: Configuration, out_path) -> None:
    """CSV export of points and connectivity for any dimension.

    Point rows carry coordinates; edge rows (chain edges and hub rays)
    reference the point labels. This is the fallback when SVG rendering is
    unavailable.
    """
    check_dimensions(problem, config)
    n = problem.n
    coord_cols = ",".join(f"x{j + 1}" for j in range(n))
    lines = [f"record,label,{coord_cols},end_label"]
    for i, p in enumerate(config.chain_points):
        coords = ",".join(repr(float(v)) for v in p)
        lines.append(f"point,a{i + 1},{coords},")
    coords = ",".join(repr(float(v)) for v in config.hub_point)
    lines.append(f"point,x,{coords},")
    empty = "," * (n - 1)
    m = problem.m
    for i in range(m):
        lines.append(f"edge,a{i + 1},{empty},a{(i + 1) % m + 1}")
    for i in range(m):
        lines.append(f"ray,x,{empty},a{i + 1}")
    _atomic_write(out_path, "\n".join(lines) + "\n")
