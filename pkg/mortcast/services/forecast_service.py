"""Stochastic forecasts of fitted mortality models.

Each period index follows its own random walk with drift; the cohort
effect of cohorts born after the last estimated one follows a random walk
with drift fitted to the estimated gamma sequence. Rates are rebuilt
through the model's log-rate formula, so every simulated rate is positive.

Intervals carry innovation uncertainty only (no parameter or Poisson
noise). Forecasts jump off from the last fitted index values.
"""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.stats import norm

from mortcast.config import settings
from mortcast.exceptions import BadDims, NotConverged, TooShort
from mortcast.logging_config import get_logger
from mortcast.models.fitted import FittedModel
from mortcast.models.forecast import ForecastResult, RwdParams

logger = get_logger(__name__)

MIN_SERIES_LENGTH = 3
MIN_SIMS = 100


def estimate_rwd(series: ArrayLike, last_index: int = 0) -> RwdParams:
    """Fit a random walk with drift to an index series.

    drift = mean of first differences = (k_T - k_1) / (T - 1)
    sigma = sample standard deviation of the differences (ddof=1)

    Raises:
        TooShort: Fewer than 3 values

    Examples:
        >>> estimate_rwd([0.0, 2.0, 1.0, 3.0])
        RwdParams(drift=1.0, sigma=1.7320508075688772, last_value=3.0, last_index=0)
    """
    values = np.asarray(series, dtype=float)
    if values.size < MIN_SERIES_LENGTH:
        raise TooShort(
            [f"Random walk needs at least {MIN_SERIES_LENGTH} values, got {values.size}"]
        )
    diffs = np.diff(values)
    return RwdParams(
        drift=float(diffs.mean()),
        sigma=float(diffs.std(ddof=1)),
        last_value=float(values[-1]),
        last_index=int(last_index),
    )


def forecast_cohort_series(
    gamma: ArrayLike,
    cohorts: Optional[ArrayLike] = None,
    mask: Optional[ArrayLike] = None,
) -> RwdParams:
    """Random walk with drift on the estimated cohort effects.

    Args:
        gamma: Cohort effects ordered by cohort
        cohorts: Cohort labels (defaults to 0..n-1)
        mask: True where gamma was estimated; thin cohorts are skipped

    Raises:
        TooShort: Fewer than 3 estimated cohorts

    Examples:
        >>> forecast_cohort_series([0.0, 0.1, 0.2, 0.3]).project(1)
        array([0.4])
    """
    gamma = np.asarray(gamma, dtype=float)
    cohorts = np.arange(gamma.size) if cohorts is None else np.asarray(cohorts)
    keep = np.ones(gamma.size, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    estimated = gamma[keep]
    if estimated.size < MIN_SERIES_LENGTH:
        raise TooShort(
            [f"Cohort forecast needs at least {MIN_SERIES_LENGTH} estimated cohorts, "
             f"got {estimated.size}"]
        )
    return estimate_rwd(estimated, last_index=int(cohorts[keep][-1]))


@dataclass(frozen=True)
class _Projection:
    """Everything needed to turn normal draws into log-rate paths."""

    ages: np.ndarray
    alpha: np.ndarray
    betas: np.ndarray
    kappa_params: tuple[RwdParams, ...]
    horizon: int
    gamma_base: Optional[np.ndarray] = None
    gamma_index: Optional[np.ndarray] = None
    cohort_params: Optional[RwdParams] = None
    n_cohort_steps: int = 0

    @property
    def n_draws(self) -> int:
        return len(self.kappa_params) * self.horizon + self.n_cohort_steps


def _select_ages(fitted: FittedModel, ages: Optional[Sequence[int]]) -> np.ndarray:
    if ages is None:
        return np.arange(fitted.ages.size)
    positions = {int(a): i for i, a in enumerate(fitted.ages)}
    missing = [int(a) for a in ages if int(a) not in positions]
    if missing:
        raise BadDims([f"Ages {missing[:5]} are not in the fitted model"])
    return np.array([positions[int(a)] for a in ages], dtype=np.int64)


def _check_inputs(fitted: FittedModel, horizon: int, n_sims: int) -> None:
    label = f"{fitted.country_code}/{fitted.sex.value if fitted.sex else '-'} {fitted.spec.kind.value}"
    if not fitted.converged:
        raise NotConverged(
            [f"{label}: fit did not converge after {fitted.n_iter} sweeps; refusing to forecast"]
        )
    errors = []
    if horizon < 1:
        errors.append(f"Horizon must be at least 1, got {horizon}")
    if n_sims < MIN_SIMS:
        errors.append(f"n_sims must be at least {MIN_SIMS}, got {n_sims}")
    if errors:
        raise BadDims(errors)


def _projection(fitted: FittedModel, horizon: int, ages: Optional[Sequence[int]]) -> _Projection:
    rows = _select_ages(fitted, ages)
    last_year = int(fitted.years[-1])
    kappa_params = tuple(estimate_rwd(k, last_index=last_year) for k in fitted.kappa)
    projection = dict(
        ages=fitted.ages[rows],
        alpha=fitted.alpha[rows],
        betas=np.array([b[rows] for b in fitted.beta]),
        kappa_params=kappa_params,
        horizon=horizon,
    )
    if not fitted.has_cohort:
        return _Projection(**projection)

    mask = fitted.cohort_mask if fitted.cohort_mask is not None else np.ones(fitted.gamma.size, bool)
    cohort_params = forecast_cohort_series(fitted.gamma, fitted.cohorts, mask)
    first_cohort = int(fitted.cohorts[0])
    last_estimated = cohort_params.last_index

    # Forecast cell (x, T + h) belongs to cohort T + h - x
    steps = np.arange(1, horizon + 1)
    cell_cohorts = last_year + steps[None, :] - fitted.ages[rows][:, None]
    n_cohort_steps = max(0, int(cell_cohorts.max()) - last_estimated)
    gamma_base = np.array(fitted.gamma[: last_estimated - first_cohort + 1])
    return _Projection(
        **projection,
        gamma_base=gamma_base,
        gamma_index=cell_cohorts - first_cohort,
        cohort_params=cohort_params,
        n_cohort_steps=n_cohort_steps,
    )


def _random_walks(params: RwdParams, steps: int, draws: np.ndarray) -> np.ndarray:
    """Paths last + h * drift + cumulative noise, shape (n_sims, steps)."""
    return params.project(steps)[None, :] + np.cumsum(params.sigma * draws, axis=1)


def standard_normal_draws(seed: int, n_sims: int, n_draws: int) -> np.ndarray:
    """Draw matrix (n_sims, n_draws); row s comes from its own PCG64 stream.

    Row s depends only on (seed, s), so any split of the simulations
    reproduces the same rows.
    """
    draws = np.empty((n_sims, n_draws))
    for sim in range(n_sims):
        stream = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, sim])))
        draws[sim] = stream.standard_normal(n_draws)
    return draws


def simulate_paths(
    fitted: FittedModel,
    horizon: int,
    n_sims: int,
    seed: int,
    ages: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Simulate future central death rates.

    Args:
        fitted: Converged model
        horizon: Steps ahead H >= 1
        n_sims: Number of paths (>= 100)
        seed: Base seed; path s uses the stream seeded by (seed, s)
        ages: Optional subset of fitted ages to reconstruct

    Returns:
        Array [sim, age, h - 1] of simulated rates

    Raises:
        NotConverged: The fit stopped at max_iter
        BadDims: Horizon < 1, n_sims < 100, or unknown ages
        TooShort: Fewer than 3 years or estimated cohorts to fit a walk on
    """
    _check_inputs(fitted, horizon, n_sims)
    projection = _projection(fitted, horizon, ages)
    draws = standard_normal_draws(seed, n_sims, projection.n_draws)

    log_rates = np.broadcast_to(
        projection.alpha[None, :, None], (n_sims, projection.ages.size, horizon)
    ).copy()
    for j, params in enumerate(projection.kappa_params):
        block = draws[:, j * horizon:(j + 1) * horizon]
        kappa_paths = _random_walks(params, horizon, block)
        log_rates += projection.betas[j][None, :, None] * kappa_paths[:, None, :]

    if projection.cohort_params is not None:
        offset = len(projection.kappa_params) * horizon
        projected = _random_walks(
            projection.cohort_params, projection.n_cohort_steps, draws[:, offset:]
        )
        gamma_paths = np.concatenate(
            [np.broadcast_to(projection.gamma_base, (n_sims, projection.gamma_base.size)), projected],
            axis=1,
        )
        log_rates += gamma_paths[:, projection.gamma_index]

    return np.exp(log_rates)


def make_forecast(
    fitted: FittedModel,
    horizon: int,
    alpha: float = settings.ALPHA,
    n_sims: int = settings.N_SIMS,
    seed: int = settings.SEED,
    ages: Optional[Sequence[int]] = None,
) -> ForecastResult:
    """Point forecasts and central (1 - alpha) intervals from simulated paths.

    point is the simulation median; lower and upper are the empirical
    alpha/2 and 1 - alpha/2 quantiles per (age, h).

    Raises:
        BadDims: alpha outside (0, 1), plus everything `simulate_paths` raises

    Examples:
        >>> result = make_forecast(fitted, horizon=30, alpha=0.2, n_sims=5000, seed=1)
        >>> result.point.shape
        (101, 30)
    """
    if not 0 < alpha < 1:
        raise BadDims([f"alpha must lie in (0, 1), got {alpha}"])
    cube = simulate_paths(fitted, horizon, n_sims, seed, ages)
    lower, upper = np.quantile(cube, [alpha / 2, 1 - alpha / 2], axis=0)
    point = np.median(cube, axis=0)
    rows = _select_ages(fitted, ages)
    logger.debug(
        f"{fitted.country_code} {fitted.spec.kind.value}: forecast H={horizon}, "
        f"{n_sims} paths, seed {seed}"
    )
    return ForecastResult(
        model=fitted.spec.kind,
        ages=fitted.ages[rows],
        horizons=np.arange(1, horizon + 1),
        point=point,
        lower=lower,
        upper=upper,
        alpha=alpha,
        n_sims=n_sims,
        seed=seed,
        generator=settings.GENERATOR_NAME,
    )


def gaussian_bounds(
    fitted: FittedModel,
    horizon: int,
    alpha: float = settings.ALPHA,
    ages: Optional[Sequence[int]] = None,
) -> ForecastResult:
    """Closed-form forecast for single-index models without a cohort term.

    log m[x, T + h] ~ Normal(a_x + b_x (k_T + h drift), b_x^2 h sigma^2), so
    the bounds are exp(mean -/+ z |b_x| sigma sqrt(h)) and the point is the
    median exp(mean).

    Raises:
        BadDims: Model has several indices or a cohort term, or bad inputs
    """
    if fitted.n_components != 1 or fitted.has_cohort:
        raise BadDims(["Closed-form bounds need one period index and no cohort term"])
    if horizon < 1:
        raise BadDims([f"Horizon must be at least 1, got {horizon}"])
    if not 0 < alpha < 1:
        raise BadDims([f"alpha must lie in (0, 1), got {alpha}"])

    rows = _select_ages(fitted, ages)
    params = estimate_rwd(fitted.kappa[0], last_index=int(fitted.years[-1]))
    steps = np.arange(1, horizon + 1)
    beta = fitted.beta[0][rows]
    centre = fitted.alpha[rows][:, None] + np.outer(beta, params.project(horizon))
    spread = norm.ppf(1 - alpha / 2) * np.abs(beta)[:, None] * params.sigma * np.sqrt(steps)[None, :]
    return ForecastResult(
        model=fitted.spec.kind,
        ages=fitted.ages[rows],
        horizons=steps,
        point=np.exp(centre),
        lower=np.exp(centre - spread),
        upper=np.exp(centre + spread),
        alpha=alpha,
        n_sims=0,
        seed=0,
        generator="closed-form",
    )
