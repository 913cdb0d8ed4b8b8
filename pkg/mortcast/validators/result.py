"""Validation result data structures."""

from dataclasses import dataclass, field
from typing import Type

from mortcast.exceptions import MortcastError


@dataclass
class ValidationResult:
    """Result of a validation operation.

    Attributes:
        valid: Whether validation passed
        errors: List of error messages (blocking issues)
        warnings: List of warning messages (non-blocking)

    Examples:
        >>> result = validate_surface(surface)
        >>> if not result:
        ...     print(result.errors)

        >>> validate_experiment_config(config).raise_for(ConfigInvalid)
    """

    valid: bool
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        """Allow truthiness checks: if result: ..."""
        return self.valid

    @classmethod
    def success(cls, warnings: list[str] = None) -> "ValidationResult":
        """Create a successful validation result."""
        return cls(valid=True, warnings=warnings or [])

    @classmethod
    def failure(
        cls, errors: list[str], warnings: list[str] = None
    ) -> "ValidationResult":
        """Create a failed validation result."""
        return cls(valid=False, errors=errors, warnings=warnings or [])

    @classmethod
    def from_messages(
        cls, errors: list[str], warnings: list[str] = None
    ) -> "ValidationResult":
        """Success when `errors` is empty, failure otherwise."""
        if errors:
            return cls.failure(errors, warnings)
        return cls.success(warnings)

    def merge(self, other: "ValidationResult") -> "ValidationResult":
        """Combine two results; the merged result fails if either does."""
        return ValidationResult(
            valid=self.valid and other.valid,
            errors=self.errors + other.errors,
            warnings=self.warnings + other.warnings,
        )

    def raise_for(self, error_type: Type[MortcastError]) -> "ValidationResult":
        """Raise `error_type` carrying the messages when validation failed.

        Returns:
            self, so calls can be chained when validation passes
        """
        if not self.valid:
            raise error_type(self.errors, self.warnings)
        return self
