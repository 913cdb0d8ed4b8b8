"""Report domain types: comparison tables and strategy verdicts."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mortcast.models.backtest import Metric, StrategyKind
from mortcast.models.fitted import ModelKind
from mortcast.models.surface import Sex

Column = tuple[ModelKind, StrategyKind]


def column_key(column: Column) -> str:
    """CSV header for a (model, strategy) column, e.g. 'lc-poisson:partial'."""
    model, strategy = column
    return f"{model.value}:{strategy.value}"


def parse_column_key(key: str) -> Column:
    model, _, strategy = key.partition(":")
    return ModelKind(model), StrategyKind(strategy)


@dataclass(frozen=True, eq=False)
class ReportTable:
    """One metric at one horizon: rows per (country, sex), columns per (model, strategy).

    Values are already on the report scale (interval scores x100). Mean rows
    are not stored; they are recomputed from the country rows.
    """

    horizon: int
    metric: Metric
    columns: tuple[Column, ...]
    rows: tuple[tuple[str, Sex], ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "metric", Metric.parse(self.metric))
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.shape != (len(self.rows), len(self.columns)):
            raise ValueError(
                f"values have shape {values.shape}, expected "
                f"({len(self.rows)}, {len(self.columns)})"
            )

    @property
    def sexes(self) -> list[Sex]:
        seen = []
        for _, sex in self.rows:
            if sex not in seen:
                seen.append(sex)
        return seen

    @property
    def is_empty(self) -> bool:
        return self.values.size == 0

    def sex_rows(self, sex: Sex) -> np.ndarray:
        keep = [i for i, (_, s) in enumerate(self.rows) if s is Sex.parse(sex)]
        return self.values[keep]

    def mean_row(self, sex: Sex) -> np.ndarray:
        """Arithmetic mean of the country rows for one sex."""
        return self.sex_rows(sex).mean(axis=0)

    def value(self, country: str, sex: Sex, column: Column) -> float:
        row = self.rows.index((country, Sex.parse(sex)))
        return float(self.values[row, self.columns.index(column)])

    @staticmethod
    def best_column(row: np.ndarray) -> Optional[int]:
        """Index of the row minimum, first column on ties; None if all NaN."""
        row = np.asarray(row, dtype=float)
        if np.all(np.isnan(row)):
            return None
        return int(np.nanargmin(row))

    def equals(self, other: "ReportTable") -> bool:
        return (
            self.horizon == other.horizon
            and self.metric is other.metric
            and self.columns == other.columns
            and self.rows == other.rows
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


@dataclass(frozen=True)
class StrategyVerdict:
    """Partial vs Full mean error for one (sex, model) at one horizon.

    Ties go to Full with `tie` set.
    """

    sex: Sex
    model: ModelKind
    metric: Metric
    horizon: int
    partial_mean: float
    full_mean: float
    winner: StrategyKind
    tie: bool = False
    n_countries: int = 0

    @property
    def margin(self) -> float:
        """Full minus Partial mean error (positive when Partial is better)."""
        return self.full_mean - self.partial_mean


@dataclass(frozen=True)
class BenchmarkComparison:
    """A reproduced mean-row value against its published counterpart."""

    metric: Metric
    sex: Sex
    model: ModelKind
    strategy: StrategyKind
    reproduced: float
    published: float
    tolerance: float

    @property
    def ratio(self) -> float:
        return self.reproduced / self.published

    @property
    def within_tolerance(self) -> bool:
        return bool(abs(self.ratio - 1.0) <= self.tolerance)


@dataclass(frozen=True)
class HeadlineResult:
    """Whether Partial wins often enough for every (metric, sex) group."""

    passed: bool
    wins: dict
    min_wins: int
