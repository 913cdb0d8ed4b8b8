"""Backtest domain types."""
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from mortcast.models.fitted import ModelKind
from mortcast.models.surface import FULL_RANGE, RETIREE_RANGE, AgeRange, Sex


class StrategyKind(str, enum.Enum):
    """How the retiree forecasts are produced.

    - PARTIAL: truncate the data to retiree ages, then fit and forecast
    - FULL: fit and forecast the full age range, then truncate the forecasts
    """

    FULL = "full"
    PARTIAL = "partial"

    @property
    def label(self) -> str:
        return "Full" if self is StrategyKind.FULL else "Partial"


class Metric(str, enum.Enum):
    """Error criteria reported per backtest cell."""

    MAPE = "mape"
    RMSPE = "rmspe"
    MEAN_INTERVAL_SCORE = "mean_interval_score"

    @property
    def report_scale(self) -> float:
        """Multiplier applied when the metric is shown in tables."""
        return 100.0 if self is Metric.MEAN_INTERVAL_SCORE else 1.0

    @property
    def label(self) -> str:
        return {
            Metric.MAPE: "MAPE",
            Metric.RMSPE: "RMSPE",
            Metric.MEAN_INTERVAL_SCORE: "Mean interval score (x100)",
        }[self]

    @classmethod
    def parse(cls, value: "str | Metric") -> "Metric":
        if isinstance(value, Metric):
            return value
        text = str(value).strip().lower()
        aliases = {"interval": cls.MEAN_INTERVAL_SCORE, "mis": cls.MEAN_INTERVAL_SCORE}
        return aliases.get(text) or cls(text)


@dataclass(frozen=True)
class Strategy:
    """A strategy and the age ranges it fits and evaluates on."""

    kind: StrategyKind
    eval_range: AgeRange = RETIREE_RANGE
    full_range: AgeRange = FULL_RANGE

    def __post_init__(self):
        object.__setattr__(self, "kind", StrategyKind(self.kind))
        if not self.full_range.contains(self.eval_range):
            raise ValueError(
                f"Evaluation range {self.eval_range.label()} must lie inside "
                f"the full range {self.full_range.label()}"
            )
        if self.eval_range.upper != self.full_range.upper:
            raise ValueError("Evaluation and full ranges must share the open top age")

    @property
    def fit_range(self) -> AgeRange:
        if self.kind is StrategyKind.PARTIAL:
            return self.eval_range
        return self.full_range


@dataclass(frozen=True)
class BacktestCell:
    """Error metrics for one (country, sex, model, strategy, horizon).

    `mean_interval_score` is stored unscaled; tables multiply it by 100.
    Failed cells carry NaN metrics and the failure message.
    """

    country: str
    sex: Sex
    model: ModelKind
    strategy: StrategyKind
    horizon: int
    mape: float
    rmspe: float
    mean_interval_score: float
    n_origins: int
    failed: bool = False
    failure: Optional[str] = field(default=None, compare=False)

    def value(self, metric: Metric) -> float:
        return {
            Metric.MAPE: self.mape,
            Metric.RMSPE: self.rmspe,
            Metric.MEAN_INTERVAL_SCORE: self.mean_interval_score,
        }[Metric.parse(metric)]

    @classmethod
    def failed_cell(
        cls,
        country: str,
        sex: Sex,
        model: ModelKind,
        strategy: StrategyKind,
        horizon: int,
        n_origins: int,
        failure: str,
    ) -> "BacktestCell":
        return cls(
            country=country,
            sex=sex,
            model=model,
            strategy=strategy,
            horizon=horizon,
            mape=math.nan,
            rmspe=math.nan,
            mean_interval_score=math.nan,
            n_origins=n_origins,
            failed=True,
            failure=failure,
        )
