"""Exception types shared across the package."""


class PercolabError(Exception):
    """Base class for package errors."""


class GraphFormatError(PercolabError, ValueError):
    """Malformed graph file, bad family parameters, or invalid embedding."""


class EventSyntaxError(PercolabError, ValueError):
    """Event expression failed to parse.

    Attributes:
        pos: character offset of the offending token, or None.
    """

    def __init__(self, message: str, pos: int | None = None):
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)
        self.pos = pos


class EvaluationError(PercolabError, ValueError):
    """Event references vertices that do not exist in the target graph."""


class MonotonicityError(PercolabError, ValueError):
    """Operation requires an increasing event but got something else."""


class StrategyError(PercolabError, ValueError):
    """Ill-formed strategy: unknown edge, re-query, missing rotation, bad spec."""


class SizeGuardError(PercolabError, RuntimeError):
    """Instance exceeds the configured exhaustive-enumeration limits."""


class HypothesisError(PercolabError, ValueError):
    """A check's structural hypotheses do not hold for the given instance."""
