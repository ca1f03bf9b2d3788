"""Exception hierarchy shared across the package."""


class ObserverNetworkError(Exception):
    """Base class for every error raised by qobsnet."""


class GraphError(ObserverNetworkError, ValueError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class NonpositiveWeightError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class SynthesisError(ObserverNetworkError):
    pass


class ZeroAlphaError(SynthesisError, ValueError):
    pass


class NonzeroPlantHamiltonianError(SynthesisError, ValueError):
    pass


class NotPositiveDefiniteError(SynthesisError):
    pass


class DynamicsError(ObserverNetworkError):
    pass


class NonFiniteError(DynamicsError, ValueError):
    pass


class BadGridError(DynamicsError, ValueError):
    pass


class SingularDriftError(DynamicsError):
    pass


class GridTooCoarseWarning(UserWarning):
    """Grid step is large compared with the fastest rate of the drift."""


class ConfigError(ObserverNetworkError):
    pass


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError, ValueError):
    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
