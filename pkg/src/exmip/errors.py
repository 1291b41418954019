"""Exception types shared across the package."""


class ExmipError(Exception):
    """Base class for all package-specific errors."""


class ModelError(ExmipError):
    """Invalid model construction (bad bounds, duplicate ids, unknown variables)."""


class FormatError(ExmipError):
    """Structured parse error carrying the offending line and section."""

    def __init__(self, message: str, line: int | None = None, section: str | None = None):
        self.line = line
        self.section = section
        where = []
        if section is not None:
            where.append(f"section {section!r}")
        if line is not None:
            where.append(f"line {line}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class UnboundedModelError(ExmipError):
    """The optimisation problem is unbounded in the optimisation direction."""


class NumericalInstabilityError(ExmipError):
    """The simplex iteration limit was exhausted even after a Bland's-rule retry."""


class SolveTimeout(ExmipError):
    """A solve exceeded its time limit; carries the best incumbent if any."""

    def __init__(self, message: str, incumbent=None):
        self.incumbent = incumbent
        super().__init__(message)


class FeasibleInputError(ExmipError):
    """IIS extraction was asked to explain a feasible system."""


class InfeasibleSeedError(ExmipError):
    """grow_mfs received a seed whose subsystem is already infeasible."""


class OracleTimeoutError(ExmipError):
    """A feasibility oracle call timed out; extraction is aborted, never guessed."""


class TooLargeError(ExmipError):
    """Brute-force enumeration refused: constraint count above the safety cap."""


class CycleError(ExmipError):
    """Precedence relation contains a cycle."""


class UnschedulableActivityError(ExmipError):
    """An activity has an empty completion-time window (lf < ef)."""


class UnknownEntityError(ExmipError):
    """Query references an activity/bid that does not exist in the instance."""


class TimeOutOfWindowError(ExmipError):
    """Query references a completion time outside the activity's [ef, lf] window."""


class InvalidQueryError(ExmipError):
    """Query payload is malformed (missing fields, wrong kind, bad group)."""


class MissingTemplateError(ExmipError):
    """No natural-language template registered for a constraint tag kind."""


class DisconnectedGraphError(ExmipError):
    """A reason graph built from a verified IIS came out disconnected.

    This should be impossible for a true IIS; raising loudly flags a bug in
    either the extraction or the feasibility oracle.
    """
