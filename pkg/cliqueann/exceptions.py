"""Error types raised by cliqueann.

Every error carries a machine-readable ``code`` and a shallow ``details``
mapping so the CLI can report failures uniformly.
"""
from typing import Any, Dict, Mapping, Optional


class CliqueANNError(Exception):
    """Base exception for all cliqueann errors."""

    def __init__(self, message: str = "", *, code: Optional[str] = None,
                 details: Optional[Mapping[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.code = code
        self.details = dict(details or {})

    def asdict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "code": self.code,
            "details": {k: self.details[k] for k in sorted(self.details)},
        }


class DimensionError(CliqueANNError, ValueError):
    """Vector length or array shape does not match what the operation expects."""

    def __init__(self, message: str, **kwargs: Any):
        kwargs.setdefault("code", "DIMENSION_MISMATCH")
        super().__init__(message, **kwargs)


class PredicateTypeError(CliqueANNError, TypeError):
    """Predicate kind is incompatible with the stored feature column."""

    def __init__(self, message: str, **kwargs: Any):
        kwargs.setdefault("code", "PREDICATE_TYPE")
        super().__init__(message, **kwargs)


class NodeNotFoundError(CliqueANNError, KeyError):
    """Node id is out of range or has been deleted."""

    def __init__(self, message: str, **kwargs: Any):
        kwargs.setdefault("code", "NODE_NOT_FOUND")
        super().__init__(message, **kwargs)

    def __str__(self) -> str:
        # KeyError would otherwise repr() the message
        return self.message


class ParameterError(CliqueANNError, ValueError):
    """Build, search or workload parameters violate their constraints."""

    def __init__(self, message: str, **kwargs: Any):
        kwargs.setdefault("code", "BAD_PARAMETER")
        super().__init__(message, **kwargs)


class VecsParseError(CliqueANNError, ValueError):
    """Malformed fvecs/ivecs/bvecs file."""

    def __init__(self, message: str, offset: int, **kwargs: Any):
        kwargs.setdefault("code", "VECS_PARSE")
        details = dict(kwargs.pop("details", None) or {})
        details["offset"] = int(offset)
        super().__init__(f"{message} (byte offset {offset})", details=details, **kwargs)
        self.offset = int(offset)


class IndexLoadError(CliqueANNError, ValueError):
    """Index file failed to load; ``check`` names the failed validation."""

    def __init__(self, message: str, check: str, **kwargs: Any):
        kwargs.setdefault("code", "INDEX_LOAD")
        details = dict(kwargs.pop("details", None) or {})
        details["check"] = check
        super().__init__(f"[{check}] {message}", details=details, **kwargs)
        self.check = check


class WorkloadError(CliqueANNError, ValueError):
    """Workload cannot be generated or read."""

    def __init__(self, message: str, **kwargs: Any):
        kwargs.setdefault("code", "WORKLOAD")
        super().__init__(message, **kwargs)


class BuildError(CliqueANNError, RuntimeError):
    """Index construction did not converge or broke a structural bound."""

    def __init__(self, message: str, **kwargs: Any):
        kwargs.setdefault("code", "BUILD")
        super().__init__(message, **kwargs)
