"""Custom exception hierarchy for the spoofeval toolkit."""

from typing import Optional


class SpoofEvalError(Exception):
    """Base exception for all spoofeval errors."""

    pass


class ParseError(SpoofEvalError):
    """Raised when a protocol, score or config text cannot be parsed.

    The rendered message carries ``source:line`` when either is known.
    """

    def __init__(
        self, message: str, line: Optional[int] = None, source: Optional[str] = None
    ) -> None:
        self.reason = message
        self.line = line
        self.source = source
        location = ""
        if source is not None and line is not None:
            location = f"{source}:{line}: "
        elif line is not None:
            location = f"line {line}: "
        elif source is not None:
            location = f"{source}: "
        super().__init__(f"{location}{message}")


class JoinError(SpoofEvalError):
    """Raised when scores cannot be joined against a protocol."""

    pass


class ConfigurationError(SpoofEvalError):
    """Raised when configuration is invalid or missing."""

    pass


class DegenerateClassError(SpoofEvalError):
    """Raised when a metric is asked for with an empty class."""

    pass


class TandemConfigurationError(SpoofEvalError):
    """Raised when the tandem cost weight beta is undefined."""

    pass


class AttackFreeError(TandemConfigurationError):
    """Raised when the ASV stops every spoof trial, so C2 == 0."""

    pass


class MissingAttackError(SpoofEvalError):
    """Raised when an attack has no spoof scores where they are required."""

    pass


class FeatureExtractionError(SpoofEvalError):
    """Raised when front-end feature extraction fails."""

    pass


class InputTooShortError(FeatureExtractionError):
    """Raised when audio is shorter than the longest analysis window."""

    pass


class DimensionMismatchError(SpoofEvalError):
    """Raised when feature dimensions do not match a model."""

    pass


class TrainingError(SpoofEvalError):
    """Raised when GMM training cannot proceed."""

    pass


class SimulationError(SpoofEvalError):
    """Raised when physical-access simulation fails."""

    pass


class ContainerFormatError(SpoofEvalError):
    """Raised when a binary feature/model container is malformed."""

    pass


class AudioError(SpoofEvalError):
    """Raised when audio cannot be read or holds no usable samples."""

    pass


class OutputCollisionError(SpoofEvalError):
    """Raised when an output directory already holds results."""

    pass


class SubmissionError(SpoofEvalError):
    """Raised when a ranking submission cannot be read."""

    def __init__(self, team_id: str, message: str) -> None:
        self.team_id = team_id
        super().__init__(f"submission '{team_id}': {message}")
