"""Surface validation functions.

These validators check that a surface is usable before it reaches a
fitter or the backtest. They never raise; callers turn a failed result
into the matching MortcastError with `raise_for`.
"""

import numpy as np

from mortcast.models.surface import MortalitySurface
from mortcast.validators.result import ValidationResult

MIN_FIT_YEARS = 3
MIN_FIT_AGES = 3
MIN_EXTRA_YEARS = 10


def validate_fit_surface(surface: MortalitySurface) -> ValidationResult:
    """Validate a surface is large enough for any fitter.

    Business Rules:
    - At least 3 years and 3 ages

    Warnings:
    - Rates outside (0, 1], i.e. the surface was not cleaned (Poisson
      fits only use the counts, log-rate fits will fail)

    Args:
        surface: Surface to fit

    Returns:
        ValidationResult with pass/fail and messages

    Examples:
        >>> validate_fit_surface(surface).raise_for(DegenerateSurface)
    """
    errors = []
    warnings = []
    label = f"{surface.country_code}/{surface.sex.value}"
    p, n = surface.shape

    if n < MIN_FIT_YEARS:
        errors.append(f"{label}: need at least {MIN_FIT_YEARS} years to fit, got {n}")
    if p < MIN_FIT_AGES:
        errors.append(f"{label}: need at least {MIN_FIT_AGES} ages to fit, got {p}")

    rates = surface.rates
    bad = ~(np.isfinite(rates) & (rates > 0) & (rates <= 1))
    if bad.any():
        warnings.append(f"{label}: {int(bad.sum())} rates outside (0, 1]")
    return ValidationResult.from_messages(errors, warnings)


def validate_backtest_surface(surface: MortalitySurface, holdout: int) -> ValidationResult:
    """Validate a surface is long enough for an expanding-window backtest.

    Business Rules:
    - holdout >= 1
    - At least holdout + 10 years, so the first origin trains on 10 years

    Warnings:
    - Repaired cells inside the evaluation window (actuals are then
      interpolated values, not observations)
    """
    errors = []
    warnings = []
    label = f"{surface.country_code}/{surface.sex.value}"
    n_years = surface.shape[1]

    if holdout < 1:
        errors.append(f"holdout must be at least 1, got {holdout}")
    elif n_years < holdout + MIN_EXTRA_YEARS:
        errors.append(
            f"{label}: {n_years} years cannot support holdout {holdout} "
            f"(need at least {holdout + MIN_EXTRA_YEARS})"
        )

    if not errors and surface.repairs:
        first_test_year = surface.last_year - holdout + 1
        repaired = sum(1 for r in surface.repairs if r.year >= first_test_year)
        if repaired:
            warnings.append(f"{label}: {repaired} repaired rates fall in the evaluation years")

    return ValidationResult.from_messages(errors, warnings)
