"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: input/configuration/precondition
problems exit with 2, resource limits with 3.
"""

from __future__ import annotations


class QnnentError(Exception):
    """Base class for all package errors."""


class InputError(QnnentError, ValueError):
    """Malformed or out-of-range argument."""


class ConfigurationError(QnnentError):
    """Inconsistent object configuration (missing positions, unknown activation, ...)."""


class PreconditionError(QnnentError):
    """An operation was called on an object in the wrong state."""


class DegenerateStateError(QnnentError):
    """Zero-norm or empty state."""


class ResourceError(QnnentError):
    """Requested computation exceeds the dense-state limits."""
