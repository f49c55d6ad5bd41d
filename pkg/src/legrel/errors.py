"""Shared exception types."""


class LegrelError(Exception):
    """Base class for all toolkit errors."""


class DegenerateInputError(LegrelError):
    """Input lies on a degenerate locus (lambda in {0,1}, zero AGM argument, ...)."""


class PrecisionError(LegrelError):
    """Working precision is insufficient for the requested computation."""


class PathError(LegrelError):
    """A continuation path passes through (or too close to) a singular value."""


class ResourceError(LegrelError):
    """A configured big-integer or iteration budget was exhausted."""


class PoleError(LegrelError):
    """Evaluation requested at (or numerically on) a pole."""
