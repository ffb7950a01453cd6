"""Exception types shared across the package."""


class NetcontagionError(Exception):
    """Base class for all package errors."""


class ParameterError(NetcontagionError, ValueError):
    """An argument is outside its documented domain."""


class EdgeListParseError(NetcontagionError, ValueError):
    """Malformed edge-list input; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class PreconditionError(NetcontagionError, ValueError):
    """A cascade/threshold precondition failed; names the offending player."""

    def __init__(self, message: str, player: int):
        super().__init__(message)
        self.player = player


class InvariantViolationError(NetcontagionError, RuntimeError):
    """An internal invariant that should hold by theory was violated."""


class UnsupportedHypothesisError(NetcontagionError, ValueError):
    """Operation requires local-effects-only unit-weight games."""


class SizeGuardError(NetcontagionError, ValueError):
    """Brute-force oracle refused an instance too large to enumerate."""


class ConnectivityError(NetcontagionError, ValueError):
    """Network is disconnected and strict connectivity was requested."""
