"""
Error response models and error handling utilities
Provides standardized error responses and the exception hierarchy
shared by every simulation module and the experiment CLI
"""

from pydantic import BaseModel
from typing import Optional, Dict
from enum import Enum


class ErrorCode(str, Enum):
    """Standard error codes for renewal lab operations"""

    # Validation errors (exit 2)
    INVALID_DISTRIBUTION = "INVALID_DISTRIBUTION"
    INVALID_STRATEGY = "INVALID_STRATEGY"
    INVALID_PARAMETER = "INVALID_PARAMETER"
    MALFORMED_CONFIG = "MALFORMED_CONFIG"
    INTEGER_ARGUMENT = "INTEGER_ARGUMENT"
    NON_ZERO_MEAN_NOISE = "NON_ZERO_MEAN_NOISE"
    INVALID_MEAN = "INVALID_MEAN"
    UNSUPPORTED_POINT = "UNSUPPORTED_POINT"

    # Runtime errors (exit 3)
    HORIZON_OVERFLOW = "HORIZON_OVERFLOW"
    WINDOW_BEYOND_HORIZON = "WINDOW_BEYOND_HORIZON"
    BEYOND_LAST_EVENT = "BEYOND_LAST_EVENT"
    QUADRATURE_FAILURE = "QUADRATURE_FAILURE"
    SPAN_UNDETECTABLE = "SPAN_UNDETECTABLE"
    PROCESSING_FAILED = "PROCESSING_FAILED"


class ErrorResponse(BaseModel):
    """
    Standardized error response model

    Attributes:
        error: Short error description
        details: Detailed technical information (optional)
        suggestion: User-friendly suggestion for resolution (optional)
        code: Error code for programmatic handling
    """
    error: str
    details: Optional[str] = None
    suggestion: Optional[str] = None
    code: ErrorCode


EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

# Error code to CLI exit code mapping
ERROR_EXIT_MAP: Dict[ErrorCode, int] = {
    # Validation errors
    ErrorCode.INVALID_DISTRIBUTION: EXIT_VALIDATION,
    ErrorCode.INVALID_STRATEGY: EXIT_VALIDATION,
    ErrorCode.INVALID_PARAMETER: EXIT_VALIDATION,
    ErrorCode.MALFORMED_CONFIG: EXIT_VALIDATION,
    ErrorCode.INTEGER_ARGUMENT: EXIT_VALIDATION,
    ErrorCode.NON_ZERO_MEAN_NOISE: EXIT_VALIDATION,
    ErrorCode.INVALID_MEAN: EXIT_VALIDATION,
    ErrorCode.UNSUPPORTED_POINT: EXIT_VALIDATION,

    # Runtime errors
    ErrorCode.HORIZON_OVERFLOW: EXIT_RUNTIME,
    ErrorCode.WINDOW_BEYOND_HORIZON: EXIT_RUNTIME,
    ErrorCode.BEYOND_LAST_EVENT: EXIT_RUNTIME,
    ErrorCode.QUADRATURE_FAILURE: EXIT_RUNTIME,
    ErrorCode.SPAN_UNDETECTABLE: EXIT_RUNTIME,
    ErrorCode.PROCESSING_FAILED: EXIT_RUNTIME,
}


# User-friendly error messages and suggestions
ERROR_MESSAGES: Dict[ErrorCode, Dict[str, str]] = {
    ErrorCode.INVALID_DISTRIBUTION: {
        "error": "Invalid distribution",
        "suggestion": 'Use JSON such as {"kind":"exponential","rate":1}; the mean must be finite and positive.'
    },
    ErrorCode.INVALID_STRATEGY: {
        "error": "Invalid window strategy",
        "suggestion": 'Use JSON such as {"kind":"large_uniform","theta":1000} with theta > 0 and c >= 0.'
    },
    ErrorCode.INVALID_PARAMETER: {
        "error": "Invalid parameter",
        "suggestion": "Check the flag value against its documented range."
    },
    ErrorCode.MALFORMED_CONFIG: {
        "error": "Malformed configuration",
        "suggestion": "The config file must be a JSON object whose keys match the CLI flag names."
    },
    ErrorCode.INTEGER_ARGUMENT: {
        "error": "Integer argument not allowed",
        "suggestion": "This formula excludes integer arguments; use the documented boundary case instead."
    },
    ErrorCode.NON_ZERO_MEAN_NOISE: {
        "error": "Noise must have zero mean",
        "suggestion": "Shift or rebalance the noise law so its analytic mean is 0."
    },
    ErrorCode.INVALID_MEAN: {
        "error": "Invalid inter-arrival mean",
        "suggestion": "The deterministic template needs a strictly positive mean t."
    },
    ErrorCode.UNSUPPORTED_POINT: {
        "error": "Point outside the support",
        "suggestion": "Evaluate the length-biased law inside the continuous support or at an atom."
    },
    ErrorCode.HORIZON_OVERFLOW: {
        "error": "Event cap exceeded before the horizon",
        "suggestion": "Reduce the horizon or the weight of atoms at zero, or raise RENEWAL_LAB_MAX_EVENTS."
    },
    ErrorCode.WINDOW_BEYOND_HORIZON: {
        "error": "Window extends beyond the generated realization",
        "suggestion": "Generate the realization with a horizon covering the window end."
    },
    ErrorCode.BEYOND_LAST_EVENT: {
        "error": "No event follows the query point",
        "suggestion": "Query points must lie before the last generated event."
    },
    ErrorCode.QUADRATURE_FAILURE: {
        "error": "Numerical integration did not converge",
        "suggestion": "Fall back to a Monte Carlo estimate of the coefficient."
    },
    ErrorCode.SPAN_UNDETECTABLE: {
        "error": "Span could not be detected",
        "suggestion": "Atom values admit no rational structure within the denominator cap."
    },
    ErrorCode.PROCESSING_FAILED: {
        "error": "Processing failed",
        "suggestion": "Unexpected failure; rerun with --log-level DEBUG for details."
    },
}


class RenewalLabError(Exception):
    """Base class for every error raised by renewal_lab"""

    default_code: ErrorCode = ErrorCode.PROCESSING_FAILED

    def __init__(self, details: Optional[str] = None, code: Optional[ErrorCode] = None):
        self.code = code or self.default_code
        self.details = details
        super().__init__(details or ERROR_MESSAGES[self.code]["error"])

    def to_response(self) -> ErrorResponse:
        return create_error_response(self.code, self.details)

    @property
    def exit_code(self) -> int:
        return get_exit_code(self.code)


class ValidationFailure(RenewalLabError, ValueError):
    """Input rejected before any computation started"""
    default_code = ErrorCode.INVALID_PARAMETER


class IntegerArgument(ValidationFailure):
    default_code = ErrorCode.INTEGER_ARGUMENT


class IntegerM(IntegerArgument):
    """Z_m CDF requested for an integer m (the CDF is exactly x there)"""


class IntegerC(IntegerArgument):
    """Floor lemma requested at an integer c (boundary case)"""


class NonZeroMeanNoise(ValidationFailure):
    default_code = ErrorCode.NON_ZERO_MEAN_NOISE


class InvalidMean(ValidationFailure):
    default_code = ErrorCode.INVALID_MEAN


class UnsupportedPoint(ValidationFailure):
    default_code = ErrorCode.UNSUPPORTED_POINT


class HorizonOverflow(RenewalLabError):
    """Event cap hit before the realization reached its horizon"""
    default_code = ErrorCode.HORIZON_OVERFLOW


class WindowBeyondHorizon(RenewalLabError):
    default_code = ErrorCode.WINDOW_BEYOND_HORIZON


class BeyondLastEvent(RenewalLabError):
    default_code = ErrorCode.BEYOND_LAST_EVENT


class QuadratureFailure(RenewalLabError):
    """Adaptive integration did not converge; callers fall back to Monte Carlo"""
    default_code = ErrorCode.QUADRATURE_FAILURE


class SpanUndetectable(RenewalLabError):
    default_code = ErrorCode.SPAN_UNDETECTABLE


def create_error_response(
    code: ErrorCode,
    details: Optional[str] = None,
    custom_suggestion: Optional[str] = None
) -> ErrorResponse:
    """
    Create a standardized error response

    Args:
        code: Error code
        details: Optional detailed technical information
        custom_suggestion: Optional custom suggestion (overrides default)

    Returns:
        ErrorResponse object
    """
    message_info = ERROR_MESSAGES.get(code, {
        "error": "An error occurred",
        "suggestion": "Please try again."
    })

    return ErrorResponse(
        error=message_info["error"],
        details=details,
        suggestion=custom_suggestion or message_info.get("suggestion"),
        code=code
    )


def get_exit_code(code: ErrorCode) -> int:
    """
    Get CLI exit code for error code

    Args:
        code: Error code

    Returns:
        Process exit code (default: 3)
    """
    return ERROR_EXIT_MAP.get(code, EXIT_RUNTIME)
