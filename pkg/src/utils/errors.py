"""Domain exceptions and their machine-readable rendering."""

from typing import Any, Dict, Optional


class LocalizationError(Exception):
    """Base class for every error raised by the localizer."""

    code = "localization_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class InvalidArgumentError(LocalizationError, ValueError):
    code = "invalid_argument"


class GeometryError(InvalidArgumentError):
    code = "invalid_geometry"


class OutOfBoundsError(LocalizationError, IndexError):
    code = "out_of_bounds"


class MapParseError(LocalizationError):
    code = "map_parse_error"


class MapValidationError(LocalizationError, ValueError):
    code = "map_validation_error"


class DatasetParseError(LocalizationError):
    code = "dataset_parse_error"


class DetectionUnavailableError(LocalizationError):
    """Raised when the remote detector cannot be reached after all retries."""

    code = "detection_unavailable"


class UnsampleableMapError(LocalizationError):
    code = "unsampleable_map"


class WorldGenerationError(LocalizationError):
    code = "world_generation_failed"


class InvalidPoseError(InvalidArgumentError):
    code = "invalid_pose"


class InvalidTrajectoryError(InvalidArgumentError):
    code = "invalid_trajectory"


def error_document(exc: BaseException) -> Dict[str, Any]:
    """
    Render an exception as the error document printed by the CLI.

    Args:
        exc: Raised exception

    Returns:
        JSON-serializable error description
    """
    if isinstance(exc, LocalizationError):
        return {
            "error": exc.message,
            "code": exc.code,
            "type": type(exc).__name__,
            "details": exc.details,
        }
    if isinstance(exc, FileNotFoundError):
        code = "not_found"
    elif isinstance(exc, OSError):
        code = "io_error"
    else:
        code = "internal_error"
    return {
        "error": str(exc) or type(exc).__name__,
        "code": code,
        "type": type(exc).__name__,
        "details": {},
    }
