"""Generalization bounds for trigonometric-polynomial models of quantum circuits."""

from .errors import CapabilityError, GTPBoundsError, NumericError, ResourceError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "GTPBoundsError",
    "NumericError",
    "ResourceError",
    "ValidationError",
]
