from __future__ import annotations

from typing import Tuple

try:
    from pydantic import ValidationError
except Exception:  # pragma: no cover - pydantic ships with the bench extras
    ValidationError = None


class FastDctPlusError(Exception):
    code = "FASTDCTPLUS_ERROR"


class InvalidSizeError(FastDctPlusError, ValueError):
    code = "INVALID_SIZE"


class DimensionMismatchError(FastDctPlusError, ValueError):
    code = "DIMENSION_MISMATCH"


class InvalidGraphError(FastDctPlusError, ValueError):
    code = "INVALID_GRAPH"


class InvalidUpdateError(FastDctPlusError, ValueError):
    code = "INVALID_UPDATE"


class NotSymmetricError(FastDctPlusError, ValueError):
    code = "NOT_SYMMETRIC"


class DeflationRequiredError(FastDctPlusError, ValueError):
    code = "DEFLATION_REQUIRED"


class SingularPoleError(FastDctPlusError, ArithmeticError):
    code = "SINGULAR_POLE"


class SecularConvergenceError(FastDctPlusError, RuntimeError):
    code = "SECULAR_NO_CONVERGENCE"


class DegenerateSpectrumError(FastDctPlusError, RuntimeError):
    code = "DEGENERATE_SPECTRUM"


class PrecisionRangeError(FastDctPlusError, ValueError):
    code = "INVALID_EPSILON"


class AngleRangeError(FastDctPlusError, ValueError):
    code = "ANGLE_OUT_OF_RANGE"


class NonFiniteInputError(FastDctPlusError, ValueError):
    code = "NAN_INPUT"


class InvalidConfigError(FastDctPlusError, ValueError):
    code = "INVALID_CONFIG"


USAGE_CODES = frozenset({"INVALID_CONFIG", "INVALID_UPDATE", "INVALID_SIZE", "INVALID_EPSILON"})


def classify_error(exc: Exception) -> Tuple[str, str]:
    message = str(exc).strip()
    if not message:
        message = exc.__class__.__name__

    if isinstance(exc, FastDctPlusError):
        return exc.code, message
    if ValidationError is not None and isinstance(exc, ValidationError):
        return "INVALID_CONFIG", message
    if isinstance(exc, FileNotFoundError):
        path = exc.filename or message
        return "IO_ERROR", f"file not found: {path}"
    if isinstance(exc, OSError):
        if exc.filename:
            return "IO_ERROR", f"{exc.strerror or message}: {exc.filename}"
        return "IO_ERROR", message

    lowered = message.lower()
    if "could not convert string to float" in lowered:
        return "INVALID_INPUT", message

    return "UNKNOWN_ERROR", message
