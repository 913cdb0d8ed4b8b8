"""Expanding-window backtest of one model and strategy on one surface.

With n years and a holdout of N, origin o = 0..N-1 trains on the first
n - N + o years and forecasts N - o steps. The horizon-h cell pools the
N - h + 1 forecasts made h steps ahead (origins 0..N-h) against the
observed rates of the evaluation ages.
"""
import hashlib
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from mortcast.config import settings
from mortcast.exceptions import DegenerateSurface, DimMismatch, MortcastError
from mortcast.logging_config import get_logger
from mortcast.models.backtest import BacktestCell, Strategy, StrategyKind
from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.forecast import ForecastResult
from mortcast.models.surface import MortalitySurface
from mortcast.services.fitting import fit
from mortcast.services.forecast_service import make_forecast
from mortcast.utils.metrics import mape, mean_interval_score, rmspe
from mortcast.utils.surface_operations import truncate_ages, truncate_years
from mortcast.validators.surface_validators import validate_backtest_surface

logger = get_logger(__name__)

Fitter = Callable[[ModelSpec, MortalitySurface], FittedModel]
Forecaster = Callable[..., ForecastResult]

FAILURES = (MortcastError, FloatingPointError, np.linalg.LinAlgError)
SEED_BITS = 63


def cell_seed(
    seed: int,
    country: str,
    sex: str,
    model: str,
    strategy: str,
    origin: int,
) -> int:
    """Simulation seed for one (population, model, strategy, origin).

    SHA-256 of "seed|country|sex|model|strategy|origin" reduced to 63 bits,
    so the seed never depends on execution order.

    Examples:
        >>> cell_seed(1, "AUS", "F", "apc", "full", 0) == cell_seed(1, "AUS", "F", "apc", "full", 0)
        True
    """
    parts = [str(seed), country, getattr(sex, "value", sex), getattr(model, "value", model),
             getattr(strategy, "value", strategy), str(origin)]
    digest = hashlib.sha256("|".join(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> (64 - SEED_BITS)


@dataclass(frozen=True)
class OriginForecast:
    """Forecast (or failure) made at one origin."""

    origin: int
    last_train_year: int
    forecast: Optional[ForecastResult] = None
    failure: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.forecast is None


@dataclass(frozen=True)
class PooledForecasts:
    """Matrices [age, origin] of the forecasts made `horizon` steps ahead."""

    horizon: int
    origins: tuple[int, ...]
    actual: np.ndarray
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def pool_origin_forecasts(
    forecasts: Sequence[OriginForecast],
    actual: MortalitySurface,
    horizon: int,
) -> PooledForecasts:
    """Stack the horizon-h columns of every origin that reaches h.

    Args:
        forecasts: One entry per origin, all successful
        actual: Observed rates on the evaluation ages (any years covering
            the forecast years)
        horizon: Steps ahead

    Returns:
        PooledForecasts with one column per origin, in origin order
    """
    reached = [f for f in forecasts if f.forecast is not None and f.forecast.max_horizon >= horizon]
    if not reached:
        raise DimMismatch([f"No successful forecast reaches horizon {horizon}"])
    columns = []
    for item in reached:
        year = item.last_train_year + horizon
        columns.append(actual.year_index(year))
    return PooledForecasts(
        horizon=horizon,
        origins=tuple(f.origin for f in reached),
        actual=actual.rates[:, columns],
        point=np.column_stack([f.forecast.point[:, horizon - 1] for f in reached]),
        lower=np.column_stack([f.forecast.lower[:, horizon - 1] for f in reached]),
        upper=np.column_stack([f.forecast.upper[:, horizon - 1] for f in reached]),
    )


class BacktestService:
    """Service running expanding-window backtests.

    Handles:
    - Training windows per origin and the strategy's fitting range
    - Per-origin seeds so cells are reproducible in any order
    - Failure isolation: a failed origin marks only the cells it feeds

    The fitter and forecaster are injected so tests can substitute
    deterministic stand-ins.
    """

    def __init__(self, fitter: Fitter = fit, forecaster: Forecaster = make_forecast):
        """Initialize backtest service.

        Args:
            fitter: fit(spec, surface) -> FittedModel
            forecaster: forecaster(fitted, horizon, alpha=, n_sims=, seed=, ages=)
        """
        self.fitter = fitter
        self.forecaster = forecaster

    def _origin_forecast(
        self,
        surface: MortalitySurface,
        spec: ModelSpec,
        strategy: Strategy,
        origin: int,
        last_train_year: int,
        horizon: int,
        alpha: float,
        n_sims: int,
        seed: int,
    ) -> OriginForecast:
        eval_ages = list(range(strategy.eval_range.lower, strategy.eval_range.upper + 1))
        train = truncate_years(surface, surface.first_year, last_train_year)
        train = truncate_ages(train, strategy.fit_range)
        origin_seed = cell_seed(
            seed, surface.country_code, surface.sex, spec.kind, strategy.kind, origin
        )
        try:
            fitted = self.fitter(spec, train)
            forecast = self.forecaster(
                fitted, horizon, alpha=alpha, n_sims=n_sims, seed=origin_seed, ages=eval_ages
            )
            forecast = forecast.truncate(strategy.eval_range)
        except FAILURES as exc:
            message = f"origin {origin} (train to {last_train_year}): {type(exc).__name__}: {exc}"
            logger.warning(
                f"{surface.country_code}/{surface.sex.value} {spec.kind.value} "
                f"{strategy.kind.value}: {message}"
            )
            return OriginForecast(origin, last_train_year, failure=message)
        logger.debug(
            f"{surface.country_code}/{surface.sex.value} {spec.kind.value} "
            f"{strategy.kind.value}: origin {origin} done (H={horizon})"
        )
        return OriginForecast(origin, last_train_year, forecast=forecast)

    def run(
        self,
        surface: MortalitySurface,
        spec: ModelSpec,
        strategy: Strategy,
        holdout: int = settings.HOLDOUT,
        alpha: float = settings.ALPHA,
        n_sims: int = settings.N_SIMS,
        seed: int = settings.SEED,
        rmspe_outside_root: bool = False,
    ) -> list[BacktestCell]:
        """Backtest one model and strategy; one cell per horizon 1..holdout.

        Args:
            surface: Cleaned surface covering the full age range
            spec: Model to refit at every origin (Plat term count is
                resolved from the strategy's fitting range when unset)
            strategy: Partial (fit on eval ages) or Full (fit on all ages)
            holdout: Number of evaluation years N
            alpha: Interval level for the interval score
            n_sims: Paths per forecast
            seed: Base seed
            rmspe_outside_root: Use the conventional RMSPE scaling

        Returns:
            Cells ordered by horizon; failed cells carry NaN metrics

        Raises:
            DegenerateSurface: Fewer than holdout + 10 years
            RangeOutOfBounds: Strategy ranges outside the surface ages
        """
        result = validate_backtest_surface(surface, holdout).raise_for(DegenerateSurface)
        for warning in result.warnings:
            logger.warning(warning)

        if spec.kind is ModelKind.PLAT:
            spec = spec.with_period_terms(spec.resolve_period_terms(strategy.fit_range.lower))

        first_test_year = surface.last_year - holdout + 1
        actual = truncate_ages(surface, strategy.eval_range)
        actual = truncate_years(actual, first_test_year, surface.last_year)

        forecasts = [
            self._origin_forecast(
                surface, spec, strategy, origin,
                last_train_year=first_test_year - 1 + origin,
                horizon=holdout - origin,
                alpha=alpha, n_sims=n_sims, seed=seed,
            )
            for origin in range(holdout)
        ]

        cells = [
            self._score_horizon(surface, spec, strategy, forecasts, actual, h, holdout, alpha,
                                rmspe_outside_root)
            for h in range(1, holdout + 1)
        ]
        n_failed = sum(cell.failed for cell in cells)
        logger.info(
            f"{surface.country_code}/{surface.sex.value} {spec.kind.value} {strategy.kind.value}: "
            f"{holdout} horizons, {n_failed} failed"
        )
        return cells

    def _score_horizon(
        self,
        surface: MortalitySurface,
        spec: ModelSpec,
        strategy: Strategy,
        forecasts: list[OriginForecast],
        actual: MortalitySurface,
        horizon: int,
        holdout: int,
        alpha: float,
        rmspe_outside_root: bool,
    ) -> BacktestCell:
        n_origins = holdout - horizon + 1
        feeding = forecasts[:n_origins]
        key = dict(
            country=surface.country_code,
            sex=surface.sex,
            model=spec.kind,
            strategy=StrategyKind(strategy.kind),
            horizon=horizon,
        )
        failed = next((f for f in feeding if f.failed), None)
        if failed is not None:
            return BacktestCell.failed_cell(**key, n_origins=n_origins, failure=failed.failure)

        pooled = pool_origin_forecasts(feeding, actual, horizon)
        try:
            return BacktestCell(
                **key,
                mape=mape(pooled.actual, pooled.point),
                rmspe=rmspe(pooled.actual, pooled.point, outside_root=rmspe_outside_root),
                mean_interval_score=mean_interval_score(
                    pooled.lower, pooled.upper, pooled.actual, alpha
                ),
                n_origins=n_origins,
            )
        except MortcastError as exc:
            return BacktestCell.failed_cell(
                **key, n_origins=n_origins, failure=f"h={horizon}: {type(exc).__name__}: {exc}"
            )


def expanding_window_backtest(
    surface: MortalitySurface,
    spec: ModelSpec,
    strategy: Strategy,
    holdout: int = settings.HOLDOUT,
    alpha: float = settings.ALPHA,
    n_sims: int = settings.N_SIMS,
    seed: int = settings.SEED,
    rmspe_outside_root: bool = False,
) -> list[BacktestCell]:
    """Backtest with the default fitter and simulation forecaster.

    Examples:
        >>> cells = expanding_window_backtest(surface, ModelSpec(ModelKind.APC),
        ...                                   Strategy(StrategyKind.PARTIAL))
        >>> [c.n_origins for c in cells][:3]
        [30, 29, 28]
    """
    return BacktestService().run(
        surface, spec, strategy, holdout=holdout, alpha=alpha, n_sims=n_sims, seed=seed,
        rmspe_outside_root=rmspe_outside_root,
    )
