"""Exception types shared across the package."""


class PadynError(Exception):
    """Base class for all errors raised by this package."""


class PrecisionError(PadynError):
    """Not enough certified base-p digits to honour the request."""


class BudgetError(PadynError):
    """An exhaustive enumeration would exceed the configured budget."""


class MapSyntaxError(PadynError):
    """Map DSL parse failure; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class AutomatonFormatError(PadynError):
    """Automaton file parse or validation failure; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateAutomatonError(PadynError):
    """The automaton can consume an infinite input while emitting nothing."""


class UnboundedLookaheadError(PadynError):
    """Some reachable cycle consumes more letters than it emits, so no
    finite digit-lookahead bound exists for the induced map."""
