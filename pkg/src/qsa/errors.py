"""Error types shared across the package.

Every error carries a stable kebab-case ``code`` so CLI and HTTP layers can
surface a closed, documented set of failure tokens.
"""

from __future__ import annotations


class QsaError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnvalidatedModelError(QsaError):
    """Raised when an operation needs a structurally valid model."""

    code = "unvalidated-model"

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class UnknownAreaError(QsaError):
    code = "unknown-area"


class UnknownAttributeError(QsaError):
    code = "unknown-attribute"


class NegativeWeightError(QsaError):
    code = "negative-weight"


class UnknownGatewayError(QsaError):
    code = "unknown-gateway"


class UnknownBranchError(QsaError):
    code = "unknown-branch"


class ArityViolationError(QsaError):
    code = "arity-violation"


class TooLargeToEnumerateError(QsaError):
    code = "too-large-to-enumerate"


class CatalogError(QsaError):
    """A model source (bundled asset or user directory) failed to load."""

    code = "asset-corruption"


class NoModelsFoundError(CatalogError):
    code = "no-models-found"
