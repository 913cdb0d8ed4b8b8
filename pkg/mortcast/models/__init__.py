"""Domain models for mortcast."""
from mortcast.models.surface import (
    FULL_RANGE,
    RETIREE_RANGE,
    AgeRange,
    MortalitySurface,
    RateKind,
    RateRepair,
    Sex,
)
from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.forecast import ForecastResult, RwdParams
from mortcast.models.backtest import BacktestCell, Metric, Strategy, StrategyKind
from mortcast.models.report import (
    BenchmarkComparison,
    HeadlineResult,
    ReportTable,
    StrategyVerdict,
)

__all__ = [
    "FULL_RANGE",
    "RETIREE_RANGE",
    "AgeRange",
    "MortalitySurface",
    "RateKind",
    "RateRepair",
    "Sex",
    "FittedModel",
    "ModelKind",
    "ModelSpec",
    "ForecastResult",
    "RwdParams",
    "BacktestCell",
    "Metric",
    "Strategy",
    "StrategyKind",
    "BenchmarkComparison",
    "HeadlineResult",
    "ReportTable",
    "StrategyVerdict",
]
