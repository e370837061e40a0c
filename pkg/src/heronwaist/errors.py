"""Exception hierarchy shared across the package.

Every error raised by this library derives from :class:`HeronWaistError`,
so callers can catch one base class. The CLI maps each subclass to a
distinct exit code.
"""

from __future__ import annotations


class HeronWaistError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(HeronWaistError, ValueError):
    """Malformed caller input: dimension mismatch, non-finite values, bad index."""


class StructuralError(HeronWaistError):
    """A problem definition violates a structural requirement (e.g. a fully
    decoupled chain vertex, or inconsistent weight/set counts)."""


class NumericalError(HeronWaistError):
    """A numerical failure during iteration (non-finite objective).

    Carries the partial convergence trace gathered before the failure in
    ``trace`` so the failing run can be inspected.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class SpecError(HeronWaistError, ValueError):
    """A problem spec file failed to parse or validate.

    ``location`` identifies the offending field (dotted path) or, for JSON
    syntax errors, the line/column reported by the decoder.
    """

    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class UnsupportedDimensionError(HeronWaistError):
    """Requested operation only exists for a specific ambient dimension."""
