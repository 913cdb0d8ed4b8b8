"""Pydantic schema for experiment configuration files.

Config files are flat `key=value` text: `#` starts a comment, blank lines
are ignored and list values are comma-separated. Unknown keys are errors.

Example file:

    data_dir = /data/hmd
    countries = AUS,SWE,EW,USA
    models = lc-poisson,plat
    holdout = 30
    last_years = AUS:2014,SWE:2016
"""
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from mortcast.config import settings
from mortcast.exceptions import ConfigInvalid
from mortcast.models.backtest import Strategy, StrategyKind
from mortcast.models.fitted import ModelKind, ModelSpec
from mortcast.models.surface import AgeRange, Sex
from mortcast.repositories.base import FileRepository


def _split(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class ExperimentConfig(BaseModel):
    """Declarative description of a backtest grid.

    Every field has a default, so an empty file runs the full 19-country
    grid against `MORTCAST_DATA_DIR`.
    """

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={
            "example": {
                "data_dir": "/data/hmd",
                "countries": ["AUS", "SWE"],
                "models": ["lc-poisson", "apc"],
                "holdout": 30,
                "n_sims": 5000,
            }
        },
    )

    data_dir: Optional[Path] = Field(
        default_factory=lambda: Path(settings.DATA_DIR) if settings.DATA_DIR else None,
        description="Directory with HMD 1x1 text files",
    )
    output_dir: Path = Field(default_factory=lambda: Path(settings.OUTPUT_DIR))
    countries: list[str] = Field(default_factory=lambda: settings.COUNTRIES, min_length=1)
    sexes: list[Sex] = Field(default_factory=lambda: [Sex.FEMALE, Sex.MALE], min_length=1)
    models: list[ModelKind] = Field(default_factory=lambda: list(ModelKind), min_length=1)
    strategies: list[StrategyKind] = Field(
        default_factory=lambda: [StrategyKind.FULL, StrategyKind.PARTIAL], min_length=1
    )
    holdout: int = Field(settings.HOLDOUT, ge=1, description="Evaluation years N")
    alpha: float = Field(settings.ALPHA, gt=0, lt=1, description="1 - interval level")
    n_sims: int = Field(settings.N_SIMS, ge=100)
    seed: int = Field(settings.SEED, ge=0)
    jobs: int = Field(settings.JOBS, ge=1, description="Worker processes")
    rmspe_outside_root: bool = False
    synthetic: bool = Field(False, description="Draw synthetic countries instead of reading HMD files")

    start_year: int = Field(settings.START_YEAR, ge=1700)
    last_years: dict[str, int] = Field(default_factory=lambda: dict(settings.LAST_YEARS))
    open_age: int = Field(settings.OPEN_AGE, ge=1, le=130)
    retiree_lower_age: int = Field(settings.RETIREE_LOWER_AGE, ge=0)
    full_lower_age: int = Field(settings.FULL_LOWER_AGE, ge=0)

    plat_period_terms: Optional[int] = Field(None, ge=2, le=3)
    max_iter: int = Field(settings.MAX_ITER, ge=1)
    tol: float = Field(settings.TOL, gt=0)
    min_cohort_cells: int = Field(settings.MIN_COHORT_CELLS, ge=1)

    @field_validator("countries", "models", "strategies", mode="before")
    @classmethod
    def split_lists(cls, value):
        return _split(value)

    @field_validator("countries")
    @classmethod
    def upper_case_countries(cls, value: list[str]) -> list[str]:
        return [country.upper() for country in value]

    @field_validator("sexes", mode="before")
    @classmethod
    def parse_sexes(cls, value):
        return [Sex.parse(item) for item in _split(value)]

    @field_validator("last_years", mode="before")
    @classmethod
    def merge_last_years(cls, value):
        """`AUS:2014,SWE:2016` overrides entries of the default table."""
        if isinstance(value, str):
            overrides = {}
            for item in _split(value):
                country, sep, year = item.partition(":")
                if not sep:
                    raise ValueError(f"expected COUNTRY:YEAR, got {item!r}")
                overrides[country.strip().upper()] = int(year)
            value = overrides
        return {**settings.LAST_YEARS, **value}

    @property
    def retiree_range(self) -> AgeRange:
        return AgeRange(self.retiree_lower_age, self.open_age, True)

    @property
    def full_range(self) -> AgeRange:
        return AgeRange(self.full_lower_age, self.open_age, True)

    def strategy(self, kind: StrategyKind) -> Strategy:
        return Strategy(StrategyKind(kind), eval_range=self.retiree_range, full_range=self.full_range)

    def model_specs(self) -> list[ModelSpec]:
        return [
            ModelSpec(
                kind=kind,
                plat_period_terms=self.plat_period_terms if kind is ModelKind.PLAT else None,
                max_iter=self.max_iter,
                tol=self.tol,
                min_cohort_cells=self.min_cohort_cells,
            )
            for kind in self.models
        ]

    def last_year(self, country: str) -> Optional[int]:
        return self.last_years.get(country)


def parse_config_text(text: str) -> dict[str, str]:
    """Flat `key=value` pairs of a config file.

    Raises:
        ConfigInvalid: A line is not key=value or a key repeats
    """
    fields: dict[str, str] = {}
    errors = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            errors.append(f"Line {line_no}: expected key=value, got {raw.strip()!r}")
            continue
        if key in fields:
            errors.append(f"Line {line_no}: duplicate key {key!r}")
            continue
        fields[key] = value.strip()
    if errors:
        raise ConfigInvalid(errors)
    return fields


def build_experiment_config(fields: dict[str, object]) -> ExperimentConfig:
    """Validate raw fields, converting pydantic errors to ConfigInvalid.

    Raises:
        ConfigInvalid: One message per offending field (unknown keys included)
    """
    try:
        return ExperimentConfig(**fields)
    except ValidationError as exc:
        messages = []
        for error in exc.errors():
            location = ".".join(str(part) for part in error["loc"]) or "config"
            if error["type"] == "extra_forbidden":
                messages.append(f"Unknown key: {location}")
            else:
                messages.append(f"{location}: {error['msg']}")
        raise ConfigInvalid(messages) from exc


def load_experiment_config(path: "str | Path", **overrides) -> ExperimentConfig:
    """Read and validate a config file; `overrides` (e.g. CLI flags) win.

    Raises:
        MissingData: File does not exist
        ConfigInvalid: Malformed lines, unknown keys, or invalid values
    """
    path = Path(path)
    text = FileRepository(path.parent).read_text(path.name)
    fields: dict[str, object] = dict(parse_config_text(text))
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return build_experiment_config(fields)
