"""
Exception hierarchy for the only-believing model checker
Every failure the checker reports derives from ModelCheckError
"""

from typing import Optional, Sequence, Tuple


class ModelCheckError(Exception):
    """Base class for all checker errors"""
    pass


class FormulaSyntaxError(ModelCheckError):
    """Raised when formula text does not conform to the grammar

    Attributes:
        line: 1-based line of the offending token (None if unknown)
        column: 1-based column of the offending token (None if unknown)
        expected: Sorted token names the parser would have accepted
    """

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, expected: Sequence[str] = ()):
        self.line = line
        self.column = column
        self.expected: Tuple[str, ...] = tuple(sorted(expected))
        location = f" at line {line}, column {column}" if line is not None else ""
        hint = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message}{location}{hint}")


class FormulaError(ModelCheckError):
    """Raised when a well-formed formula breaks a language invariant

    Examples are a modal operator inside an explicit-belief body, or an
    agent id outside the instance's agent set.
    """
    pass


class InstanceError(ModelCheckError):
    """Raised when an instance document is invalid

    Attributes:
        kind: One of 'schema', 'unknown-agent', 'unknown-atom',
              'base-outside-vocabulary'
    """

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class EnumerationCapExceeded(ModelCheckError):
    """Raised when the universal context is too large to enumerate"""

    def __init__(self, bits: int, cap: int):
        self.bits = bits
        self.cap = cap
        super().__init__(
            f"context needs {bits} bits (2^{bits} states), enumeration cap is {cap} bits; "
            f"use the bdd engine"
        )


class TranslationError(ModelCheckError):
    """Raised when translate meets a node it has no clause for (Only, Expand)"""
    pass


class BddError(ModelCheckError):
    """Raised on BDD store misuse: unknown variable, foreign node-ref, missing assignment"""
    pass


class ResourceLimitExceeded(ModelCheckError):
    """Raised when a check exhausts its time or node budget (reported as KO)

    Attributes:
        reason: 'timeout' or 'nodes'
    """

    def __init__(self, reason: str, message: str):
        self.reason = reason
        super().__init__(message)
