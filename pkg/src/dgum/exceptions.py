"""Exceptions raised by dgum."""

from __future__ import annotations


class DgumError(Exception):
    """Base class for all dgum errors."""


class InvalidArgumentError(DgumError, ValueError):
    """An argument violates a documented precondition."""


class EmbeddingError(DgumError):
    """The circulant covariance base is not realizable on the torus."""


class CapacityError(DgumError):
    """The requested problem is too large for a dense oracle."""


class FactorizationError(DgumError):
    """A dense covariance matrix could not be factorized."""


class DataError(DgumError, ValueError):
    """Input data is inconsistent (foreign labels, shape mismatch, bad file)."""


class ConfigError(DgumError, ValueError):
    """A run configuration could not be resolved."""
