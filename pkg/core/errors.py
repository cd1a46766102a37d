"""
Error hierarchy for the quantum relations toolkit
"""

from typing import Any, Optional


class QRelError(Exception):
    """Base class for every error raised by the library"""


class ValidationError(QRelError):
    """An input failed its validation predicate.

    The optional witness is a JSON-serializable counterexample that the CLI
    reports verbatim.
    """

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.witness = witness

    def to_dict(self) -> dict:
        payload = {'error': type(self).__name__, 'message': self.message}
        if self.witness is not None:
            payload['witness'] = self.witness
        return payload


class ShapeMismatchError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class ScalarModeError(ValidationError):
    """Exact and float scalars were mixed in one computation"""


class AmbientMismatchError(ValidationError):
    """Two relations live over different von Neumann algebras"""


class EmptySubsetError(ValidationError):
    pass


class GuardExceededError(ValidationError):
    """A brute-force enumeration would exceed its configured size guard"""


class ExactModeRequiredError(ValidationError):
    pass


class ConfigError(ValidationError):
    """Environment settings failed Config.validate_config"""


class ParseError(QRelError):
    """Malformed input text, with the position of the first problem"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        return {
            'error': 'ParseError',
            'message': self.message,
            'line': self.line,
            'column': self.column
        }
