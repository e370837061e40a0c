"""Problem spec files, results files and trace files.

Problem specs are JSON documents::

    {
      "dimension": 2,
      "chain_sets": [{"kind": "ball", "center": [7, -6], "radius": 1.0}, ...],
      "hub_set":   {"kind": "box", "center": [1, -1], "half_widths": [1, 1]},
      "rho":   [1, 2, 2, 1],
      "omega": [2, 1, 1, 2],
      "init":  "anchors" | {"chain_points": [[...], ...], "hub_point": [...]},
      "solver": {"step_rule": ..., "step_scale": ..., "tolerance": ...,
                 "max_iter": ..., "step_offset": ..., "stop_on_gradient": ...}
    }

``init`` and ``solver`` are optional. Set kinds and their fields: ball
(center, radius), box (center, half_widths), halfspace (normal, offset),
singleton (point). Two instances are bundled with the package, see
:func:`bundled_spec_names`.

Numbers are serialized with Python's shortest round-trip float
representation, so parse(serialize(p)) reproduces p exactly; printed
summaries round to 12 significant digits instead. All files are UTF-8;
writes go through a temp file and an atomic rename.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import InvalidInputError, SpecError, StructuralError
from .geometry import Ball, Box, ConvexSet, HalfSpace, Singleton
from .optimality import OptimalityReport
from .problem import (
    Configuration,
    Problem,
    Weights,
    check_nondegeneracy,
    objective,
    pair_label,
)
from .solver import SolveResult, SolverConfig, TraceRecord

_SET_FIELDS = {
    "ball": ("center", "radius"),
    "box": ("center", "half_widths"),
    "halfspace": ("normal", "offset"),
    "singleton": ("point",),
}


# ---------------------------------------------------------------------------
# low-level helpers


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _expect(mapping, key, kind, where):
    if not isinstance(mapping, dict):
        raise SpecError(f"expected an object, got {type(mapping).__name__}", where)
    if key not in mapping:
        raise SpecError("missing required field", f"{where}.{key}" if where else key)
    value = mapping[key]
    loc = f"{where}.{key}" if where else key
    if kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SpecError(f"expected a number, got {value!r}", loc)
    elif kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise SpecError(f"expected an integer, got {value!r}", loc)
    elif kind == "list":
        if not isinstance(value, list):
            raise SpecError(f"expected a list, got {value!r}", loc)
    elif kind == "object":
        if not isinstance(value, dict):
            raise SpecError(f"expected an object, got {value!r}", loc)
    elif kind == "string":
        if not isinstance(value, str):
            raise SpecError(f"expected a string, got {value!r}", loc)
    return value


def _vector(value, where):
    if not isinstance(value, list) or not value:
        raise SpecError(f"expected a nonempty coordinate list, got {value!r}", where)
    for j, entry in enumerate(value):
        if isinstance(entry, bool) or not isinstance(entry, (int, float)):
            raise SpecError(f"expected a number, got {entry!r}", f"{where}[{j}]")
    return [float(v) for v in value]


# ---------------------------------------------------------------------------
# problem specs


def _parse_set(record, where) -> ConvexSet:
    kind = _expect(record, "kind", "string", where)
    if kind not in _SET_FIELDS:
        raise SpecError(
            f"unknown set kind {kind!r}; expected one of {sorted(_SET_FIELDS)}",
            f"{where}.kind",
        )
    extra = set(record) - {"kind", *_SET_FIELDS[kind]}
    if extra:
        raise SpecError(f"unexpected fields for kind {kind!r}: {sorted(extra)}", where)
    try:
        if kind == "ball":
            return Ball(
                _vector(_expect(record, "center", "list", where), f"{where}.center"),
                float(_expect(record, "radius", "number", where)),
            )
        if kind == "box":
            return Box(
                _vector(_expect(record, "center", "list", where), f"{where}.center"),
                _vector(_expect(record, "half_widths", "list", where), f"{where}.half_widths"),
            )
        if kind == "halfspace":
            return HalfSpace(
                _vector(_expect(record, "normal", "list", where), f"{where}.normal"),
                float(_expect(record, "offset", "number", where)),
            )
        return Singleton(_vector(_expect(record, "point", "list", where), f"{where}.point"))
    except InvalidInputError as exc:
        raise StructuralError(f"{where}: {exc}") from exc


def _set_record(s: ConvexSet) -> dict:
    if isinstance(s, Ball):
        return {"kind": "ball", "center": s.center.tolist(), "radius": s.radius}
    if isinstance(s, Box):
        return {"kind": "box", "center": s.center.tolist(), "half_widths": s.half_widths.tolist()}
    if isinstance(s, HalfSpace):
        return {"kind": "halfspace", "normal": s.normal.tolist(), "offset": s.offset}
    if isinstance(s, Singleton):
        return {"kind": "singleton", "point": s.point.tolist()}
    raise InvalidInputError(f"cannot serialize set of type {type(s).__name__}")


def _parse_solver(record, where) -> SolverConfig:
    known = {
        "step_rule",
        "step_scale",
        "step_offset",
        "tolerance",
        "max_iter",
        "stop_on_gradient",
        "trace_stride",
    }
    extra = set(record) - known
    if extra:
        raise SpecError(f"unknown solver fields: {sorted(extra)}", where)
    kwargs = {}
    for key in known:
        if key in record:
            kwargs[key] = record[key]
    try:
        return SolverConfig(**kwargs)
    except (InvalidInputError, ValueError) as exc:
        raise StructuralError(f"{where}: {exc}") from exc


@dataclass(frozen=True)
class ParsedSpec:
    problem: Problem
    init: Configuration | None
    solver: SolverConfig | None


def parse_problem(text: str) -> ParsedSpec:
    """Parse and validate a problem spec document.

    Raises :class:`SpecError` for malformed documents (with a line/field
    location) and :class:`StructuralError` for well-formed documents whose
    content violates a problem invariant, including the vertex-coupling
    assumption rho_{k-1} + rho_k + omega_k > 0.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(str(exc), f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise SpecError(f"top level must be an object, got {type(doc).__name__}")

    known = {"dimension", "chain_sets", "hub_set", "rho", "omega", "init", "solver"}
    extra = set(doc) - known
    if extra:
        raise SpecError(f"unknown top-level fields: {sorted(extra)}")

    n = _expect(doc, "dimension", "int", "")
    if n < 1:
        raise SpecError(f"dimension must be >= 1, got {n}", "dimension")

    raw_sets = _expect(doc, "chain_sets", "list", "")
    chain_sets = [
        _parse_set(rec, f"chain_sets[{i}]") for i, rec in enumerate(raw_sets)
    ]
    hub_set = _parse_set(_expect(doc, "hub_set", "object", ""), "hub_set")
    for i, s in enumerate(chain_sets):
        if s.dim != n:
            raise StructuralError(
                f"chain_sets[{i}]: set dimension {s.dim} does not match dimension {n}"
            )
    if hub_set.dim != n:
        raise StructuralError(
            f"hub_set: set dimension {hub_set.dim} does not match dimension {n}"
        )

    rho = _vector(_expect(doc, "rho", "list", ""), "rho")
    omega = _vector(_expect(doc, "omega", "list", ""), "omega")
    try:
        weights = Weights(rho, omega)
        problem = Problem(tuple(chain_sets), hub_set, weights)
    except InvalidInputError as exc:
        raise StructuralError(str(exc)) from exc

    bad = check_nondegeneracy(problem)
    if bad:
        raise StructuralError(
            f"rho/omega: chain vertices {bad} are fully decoupled "
            "(rho and omega vanish around them)"
        )

    init = None
    if "init" in doc and doc["init"] != "anchors":
        rec = doc["init"]
        if not isinstance(rec, dict):
            raise SpecError(
                f'init must be "anchors" or an object with chain_points/hub_point, got {rec!r}',
                "init",
            )
        rows = _expect(rec, "chain_points", "list", "init")
        pts = [_vector(row, f"init.chain_points[{i}]") for i, row in enumerate(rows)]
        hub = _vector(_expect(rec, "hub_point", "list", "init"), "init.hub_point")
        try:
            init = Configuration(pts, hub)
        except InvalidInputError as exc:
            raise StructuralError(f"init: {exc}") from exc
        if init.m != problem.m or init.n != problem.n:
            raise StructuralError(
                f"init: has shape (m={init.m}, n={init.n}), "
                f"problem expects (m={problem.m}, n={problem.n})"
            )

    solver = None
    if "solver" in doc:
        solver = _parse_solver(_expect(doc, "solver", "object", ""), "solver")

    return ParsedSpec(problem, init, solver)


def serialize_problem(
    problem: Problem,
    init: Configuration | None = None,
    solver: SolverConfig | None = None,
) -> str:
    """Serialize a problem (plus optional init and solver sections) to JSON."""
    doc = {
        "dimension": problem.n,
        "chain_sets": [_set_record(s) for s in problem.chain_sets],
        "hub_set": _set_record(problem.hub_set),
        "rho": problem.rho.tolist(),
        "omega": problem.omega.tolist(),
    }
    if init is not None:
        doc["init"] = {
            "chain_points": init.chain_points.tolist(),
            "hub_point": init.hub_point.tolist(),
        }
    if solver is not None:
        doc["solver"] = {
            "step_rule": solver.step_rule.value,
            "step_scale": solver.step_scale,
            "step_offset": solver.step_offset,
            "tolerance": solver.tolerance,
            "max_iter": solver.max_iter,
            "stop_on_gradient": solver.stop_on_gradient,
            "trace_stride": solver.trace_stride,
        }
    return json.dumps(doc, indent=2) + "\n"


def load_problem(path) -> ParsedSpec:
    return parse_problem(Path(path).read_text(encoding="utf-8"))


def save_problem(path, problem, init=None, solver=None) -> None:
    _atomic_write(path, serialize_problem(problem, init, solver))


def bundled_spec_names() -> tuple[str, ...]:
    """Names accepted by :func:`bundled_spec_text`.

    ``planar_discs``: four unit discs chained around a square hub region in
    the plane. ``spatial_cubes``: five unit cubes chained around a unit-ball
    hub region in space.
    """
    return ("planar_discs", "spatial_cubes")


def bundled_spec_text(name: str) -> str:
    if name not in bundled_spec_names():
        raise InvalidInputError(
            f"unknown bundled spec {name!r}; available: {', '.join(bundled_spec_names())}"
        )
    return (resources.files("heronwaist") / "data" / f"{name}.json").read_text("utf-8")


def load_bundled_spec(name: str) -> ParsedSpec:
    return parse_problem(bundled_spec_text(name))


# ---------------------------------------------------------------------------
# results and traces


@dataclass(frozen=True)
class LoadedResults:
    best_config: Configuration
    best_objective: float
    iterations: int
    stop_reason: str
    checkpoints: dict[float, int]
    init_projected: bool
    optimality: dict | None


def _optimality_record(report: OptimalityReport) -> dict:
    rec = {
        "verdict": report.verdict.value,
        "tol": report.tol,
        "chain_normal_ok": list(report.chain_normal_ok),
        "hub_normal_ok": report.hub_normal_ok,
        "global_balance_norm": report.global_balance_norm,
        "indeterminate_vertices": list(report.indeterminate_vertices),
        "hub_indeterminate": report.hub_indeterminate,
        "chain_residuals": report.chain_residuals.tolist(),
        "hub_residual": report.hub_residual.tolist(),
    }
    if report.disjointness is not None:
        rec["disjoint_margin"] = report.disjointness.margin
        rec["disjoint_flagged"] = [
            [pair_label(p.first), pair_label(p.second), p.distance]
            for p in report.disjointness.flagged
        ]
    return rec


def serialize_results(result: SolveResult, report: OptimalityReport | None = None) -> str:
    doc = {
        "best_config": {
            "chain_points": result.best_config.chain_points.tolist(),
            "hub_point": result.best_config.hub_point.tolist(),
        },
        "best_objective": result.best_objective,
        "iterations": result.iterations,
        "stop_reason": result.stop_reason.value,
        "init_projected": result.init_projected,
        "checkpoints": [
            {"tolerance": tol, "iteration": it}
            for tol, it in sorted(result.checkpoints.items(), reverse=True)
        ],
        "optimality": _optimality_record(report) if report is not None else None,
    }
    return json.dumps(doc, indent=2) + "\n"


def save_results(path, result: SolveResult, report: OptimalityReport | None = None) -> None:
    _atomic_write(path, serialize_results(result, report))


def parse_results(text: str) -> LoadedResults:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(str(exc), f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise SpecError("results document must be an object")
    rec = _expect(doc, "best_config", "object", "")
    rows = _expect(rec, "chain_points", "list", "best_config")
    if not rows:
        raise SpecError("results contain no chain points to use", "best_config.chain_points")
    pts = [_vector(row, f"best_config.chain_points[{i}]") for i, row in enumerate(rows)]
    hub = _vector(_expect(rec, "hub_point", "list", "best_config"), "best_config.hub_point")
    try:
        config = Configuration(pts, hub)
    except InvalidInputError as exc:
        raise SpecError(str(exc), "best_config") from exc
    checkpoints = {}
    for i, entry in enumerate(doc.get("checkpoints") or []):
        tol = _expect(entry, "tolerance", "number", f"checkpoints[{i}]")
        it = _expect(entry, "iteration", "int", f"checkpoints[{i}]")
        checkpoints[float(tol)] = it
    return LoadedResults(
        best_config=config,
        best_objective=float(_expect(doc, "best_objective", "number", "")),
        iterations=int(_expect(doc, "iterations", "int", "")),
        stop_reason=str(doc.get("stop_reason", "")),
        checkpoints=checkpoints,
        init_projected=bool(doc.get("init_projected", False)),
        optimality=doc.get("optimality"),
    )


def load_results(path) -> LoadedResults:
    return parse_results(Path(path).read_text(encoding="utf-8"))


def check_results_consistency(problem: Problem, results: LoadedResults) -> float:
    """Recompute the objective at the stored configuration and compare.

    Returns the recomputed value; raises :class:`SpecError` if it differs
    from the stored best objective by more than 1e-12 (a corrupt or
    mismatched results file).
    """
    value = objective(problem, results.best_config)
    if abs(value - results.best_objective) > 1e-12:
        raise SpecError(
            f"stored best_objective {results.best_objective!r} does not match "
            f"recomputed objective {value!r}"
        )
    return value


TRACE_HEADER = ("k", "J", "J_best", "alpha", "grad_norm")


def write_trace_csv(path, trace: list[TraceRecord]) -> None:
    """Comma-separated trace with full-precision floats (exact round trip)."""
    lines = [",".join(TRACE_HEADER)]
    for rec in trace:
        lines.append(
            f"{rec.k},{rec.objective!r},{rec.best_objective!r},{rec.step!r},{rec.grad_norm!r}"
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def read_trace_csv(path) -> list[TraceRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != TRACE_HEADER:
            raise SpecError(f"unexpected trace header {header!r}")
        out = []
        for row in reader:
            if len(row) != 5:
                raise SpecError(f"malformed trace row: {row!r}")
            out.append(
                TraceRecord(int(row[0]), float(row[1]), float(row[2]), float(row[3]), float(row[4]))
            )
    return out
