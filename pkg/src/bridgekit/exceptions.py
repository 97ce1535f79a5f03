"""Semantic exception hierarchy.

Every failure mode that callers are expected to handle gets its own class;
generic ``ValueError``/``TypeError`` are reserved for plain misuse (wrong
shapes, non-finite input, parameters outside their documented range).
"""

from __future__ import annotations


class BridgekitError(Exception):
    """Base class for all library-specific failures."""


class MassDeficitError(BridgekitError):
    """A density was requested on a grid too narrow to hold its mass.

    Carries the trapezoid mass that the grid actually captured.
    """

    def __init__(self, message: str, captured_mass: float):
        super().__init__(message)
        self.captured_mass = float(captured_mass)


class AbsoluteContinuityError(BridgekitError):
    """Relative entropy H(p|r) requested where p charges a null set of r."""


class UnsupportedCaseError(BridgekitError):
    """Input is outside the class the closed forms cover (e.g. unequal variances)."""


class KernelTruncationError(BridgekitError):
    """A kernel row lost too much mass to grid truncation.

    Carries the worst row index and the mass that row captured.
    """

    def __init__(self, message: str, row: int, captured_mass: float):
        super().__init__(message)
        self.row = int(row)
        self.captured_mass = float(captured_mass)


class ConvergenceError(BridgekitError):
    """Iteration budget exhausted (or a non-converged solution was used).

    ``marginal_error`` holds the last sup-norm marginal residual when the
    error comes from the fixed-point solver, else ``nan``.
    """

    def __init__(self, message: str, marginal_error: float = float("nan")):
        super().__init__(message)
        self.marginal_error = float(marginal_error)


class DiscretizationError(BridgekitError):
    """A quantity that should be conserved drifted beyond its tolerance."""


class ScheduleDomainError(BridgekitError):
    """Horizon parameter b outside the admissible domain (0, b_max).

    Carries ``b_max`` so callers can clamp or subsample.
    """

    def __init__(self, message: str, b_max: float):
        super().__init__(message)
        self.b_max = float(b_max)


class ModelMismatchError(BridgekitError):
    """An operation specific to one kernel family got the other one."""


class IllConditionedPathError(BridgekitError):
    """Too much of the grid underflowed to zero density to trust velocities."""


class ConfigError(BridgekitError):
    """Malformed problem configuration (CLI). Carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
