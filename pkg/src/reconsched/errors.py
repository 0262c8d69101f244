"""Exception hierarchy shared by every module."""


class ReconstructionError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(ReconstructionError, ValueError):
    pass


class ParseError(ModelError):
    pass


class ConsistencyError(ModelError):
    pass


class CycleError(ModelError):
    pass


class RouteError(ReconstructionError):
    pass


class NoRouteError(RouteError):
    pass


class DeadEndpointError(RouteError):
    pass


class EmptyPlatformError(ReconstructionError):
    pass


class PriorityError(ModelError):
    pass


class MissingTaskError(PriorityError):
    pass


class DuplicateTaskError(PriorityError):
    pass


class UnknownTaskError(PriorityError):
    pass


class UnknownEndSystemError(ModelError):
    pass


class ContextError(ReconstructionError, ValueError):
    pass


class OverrunError(ContextError):
    pass


class AlreadyFailedError(ContextError):
    pass


class UnknownModeError(ContextError):
    pass


class NoSnapshotError(ReconstructionError):
    pass


class DeadlockError(ReconstructionError):
    pass


class ConfigError(ReconstructionError, ValueError):
    pass


class SafetyViolationError(ReconstructionError):
    """A reconstructed schedule failed its own safety check (an engine bug)."""
