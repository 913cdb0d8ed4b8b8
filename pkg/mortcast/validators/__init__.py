"""Validation helpers for mortcast."""
from mortcast.validators.result import ValidationResult

__all__ = ["ValidationResult"]
