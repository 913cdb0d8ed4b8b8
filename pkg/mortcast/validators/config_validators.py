"""Experiment configuration validation.

Field-level bounds live on the pydantic schema; these checks cover rules
that span several fields.
"""
from mortcast.models.fitted import ModelKind
from mortcast.schemas.experiment import ExperimentConfig
from mortcast.validators.result import ValidationResult
from mortcast.validators.surface_validators import MIN_EXTRA_YEARS


def _duplicates(values) -> list:
    seen, repeated = set(), []
    for value in values:
        if value in seen and value not in repeated:
            repeated.append(value)
        seen.add(value)
    return repeated


def validate_experiment_config(config: ExperimentConfig) -> ValidationResult:
    """Validate an experiment before any data is read.

    Business Rules:
    - HMD runs need a data directory (synthetic runs do not)
    - Countries, sexes, models and strategies are listed once each
    - full_lower_age <= retiree_lower_age < open_age
    - Every country's year span holds holdout + 10 years
    - Plat term count, when forced, only matters if Plat is requested (warning)

    Returns:
        ValidationResult with pass/fail and messages

    Examples:
        >>> validate_experiment_config(config).raise_for(ConfigInvalid)
    """
    errors = []
    warnings = []

    if not config.synthetic and config.data_dir is None:
        errors.append("data_dir is required (set it in the config or MORTCAST_DATA_DIR)")

    for name in ("countries", "sexes", "models", "strategies"):
        repeated = _duplicates(getattr(config, name))
        if repeated:
            labels = ", ".join(str(getattr(v, "value", v)) for v in repeated)
            errors.append(f"{name} lists {labels} more than once")

    if not config.full_lower_age <= config.retiree_lower_age < config.open_age:
        errors.append(
            f"Need full_lower_age ({config.full_lower_age}) <= retiree_lower_age "
            f"({config.retiree_lower_age}) < open_age ({config.open_age})"
        )

    needed = config.holdout + MIN_EXTRA_YEARS
    for country in config.countries:
        last_year = config.last_year(country)
        if last_year is None:
            if not config.synthetic:
                warnings.append(f"{country}: no last year configured, using every year on file")
            continue
        span = last_year - config.start_year + 1
        if span < needed:
            errors.append(
                f"{country}: {config.start_year}-{last_year} gives {span} years, "
                f"holdout {config.holdout} needs {needed}"
            )

    if config.plat_period_terms is not None and ModelKind.PLAT not in config.models:
        warnings.append("plat_period_terms is set but Plat is not among the models")

    return ValidationResult.from_messages(errors, warnings)
