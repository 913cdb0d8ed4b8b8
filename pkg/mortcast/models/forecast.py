"""Forecast domain types."""
from dataclasses import dataclass

import numpy as np

from mortcast.models.fitted import ModelKind
from mortcast.models.surface import AgeRange


@dataclass(frozen=True)
class RwdParams:
    """Random walk with drift fitted to one index series.

    Attributes:
        drift: Mean yearly change
        sigma: Innovation standard deviation (>= 0)
        last_value: Jump-off value of the series
        last_index: Label (year or cohort) of the jump-off value
    """

    drift: float
    sigma: float
    last_value: float
    last_index: int

    def __post_init__(self):
        if not np.isfinite(self.drift):
            raise ValueError("drift must be finite")
        if not self.sigma >= 0:
            raise ValueError("sigma must be non-negative")

    def project(self, steps: int) -> np.ndarray:
        """Deterministic path last_value + h * drift for h = 1..steps."""
        return self.last_value + self.drift * np.arange(1, steps + 1)


@dataclass(frozen=True, eq=False)
class ForecastResult:
    """Point forecasts and prediction bounds for h = 1..H.

    Matrices are indexed [age, h - 1].
    """

    model: ModelKind
    ages: np.ndarray
    horizons: np.ndarray
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    alpha: float
    n_sims: int
    seed: int
    generator: str = "PCG64"

    def __post_init__(self):
        shape = (len(self.ages), len(self.horizons))
        for name in ("point", "lower", "upper"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} must have shape {shape}")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    @property
    def max_horizon(self) -> int:
        return int(self.horizons[-1])

    def truncate(self, age_range: AgeRange) -> "ForecastResult":
        """Restrict the forecast to `age_range` (labels must be present)."""
        ages = np.asarray(self.ages)
        keep = (ages >= age_range.lower) & (ages <= age_range.upper)
        if ages[keep].size != age_range.size:
            raise ValueError(f"Forecast ages do not cover {age_range.label()}")
        return ForecastResult(
            model=self.model,
            ages=ages[keep],
            horizons=self.horizons,
            point=self.point[keep],
            lower=self.lower[keep],
            upper=self.upper[keep],
            alpha=self.alpha,
            n_sims=self.n_sims,
            seed=self.seed,
            generator=self.generator,
        )
