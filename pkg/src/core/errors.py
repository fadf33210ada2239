from typing import Optional


__all__ = [
    "SounderError", "ConfigError", "SequenceError", "SignalError",
    "ChannelError", "EstimationError", "ScenarioError",
]


class SounderError(ValueError):
    """Base class for every rejected input or violated invariant in the sounder."""


class ConfigError(SounderError):
    pass


class SequenceError(SounderError):
    pass


class SignalError(SounderError):
    pass


class ChannelError(SounderError):
    pass


class EstimationError(SounderError):
    pass


class ScenarioError(SounderError):
    def __init__(self, message: str, point_index: Optional[int] = None):
        super().__init__(message)
        self.point_index = point_index
