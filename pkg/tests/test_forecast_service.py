"""Tests for random-walk forecasting and simulation."""
from dataclasses import replace

import numpy as np
import pytest

from mortcast.exceptions import BadDims, NotConverged, TooShort
from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.surface import AgeRange
from mortcast.services.fitting import fit_apc, fit_lc_gaussian
from mortcast.services.forecast_service import (
    estimate_rwd,
    forecast_cohort_series,
    gaussian_bounds,
    make_forecast,
    simulate_paths,
    standard_normal_draws,
)
from tests.conftest import smooth_surface


def _deterministic_apc() -> FittedModel:
    """APC on ages 0..4, years 2000..2004 with noiseless linear indices.

    Cohorts 1996..2002 carry gamma = 0.5 (c - 1996); 2003 and 2004 are thin.
    """
    cohorts = np.arange(1996, 2005)
    gamma = np.where(cohorts <= 2002, 0.5 * (cohorts - 1996), 0.0)
    return FittedModel(
        spec=ModelSpec(ModelKind.APC),
        ages=np.arange(5),
        years=np.arange(2000, 2005),
        alpha=np.full(5, -3.0),
        beta=(np.ones(5),),
        kappa=(np.array([2.0, 1.0, 0.0, -1.0, -2.0]),),
        gamma=gamma,
        cohorts=cohorts,
        cohort_mask=cohorts <= 2002,
        converged=True,
        country_code="TST",
    )


@pytest.fixture
def lc_fit(retiree_lc_surface):
    return fit_lc_gaussian(retiree_lc_surface)


class TestEstimateRwd:
    """Tests for estimate_rwd and forecast_cohort_series."""

    def test_drift_and_sigma(self):
        """Drift is the mean difference and sigma the sample std (ddof=1)."""
        params = estimate_rwd([0.0, 2.0, 1.0, 3.0])
        assert params.drift == pytest.approx(1.0)
        assert params.sigma == pytest.approx(np.sqrt(3.0))
        assert params.last_value == 3.0

    def test_too_short(self):
        """Two values cannot support a random walk."""
        with pytest.raises(TooShort):
            estimate_rwd([1.0, 2.0])

    def test_project(self):
        """Deterministic path is last + h * drift."""
        params = estimate_rwd([0.0, 1.0, 2.0])
        assert params.project(3).tolist() == [3.0, 4.0, 5.0]

    def test_cohort_series_skips_masked(self):
        """Thin cohorts do not enter the cohort walk."""
        params = forecast_cohort_series(
            [0.0, 0.5, 1.0, 1.5, 0.0], cohorts=[10, 11, 12, 13, 14],
            mask=[True, True, True, True, False],
        )
        assert params.drift == pytest.approx(0.5)
        assert params.last_index == 13
        assert params.last_value == 1.5

    def test_cohort_series_too_short(self):
        """Fewer than 3 estimated cohorts raise TooShort."""
        with pytest.raises(TooShort):
            forecast_cohort_series([0.1, 0.2, 0.3], mask=[True, True, False])


class TestDeterministicCohortForecast:
    """Zero-variance walks reproduce the linear extrapolation exactly."""

    def test_cohort_effects_extend_past_last_estimated(self):
        """log m = -3 + kappa + gamma with both walks extrapolated."""
        result = make_forecast(_deterministic_apc(), horizon=3, n_sims=100, seed=1)
        ages = np.arange(5)
        for h in range(1, 4):
            year = 2004 + h
            expected = -3.0 + (-2.0 - h) + 0.5 * (year - ages - 1996)
            np.testing.assert_allclose(np.log(result.point[:, h - 1]), expected, atol=1e-12)
        np.testing.assert_allclose(result.lower, result.point)
        np.testing.assert_allclose(result.upper, result.point)

    def test_first_step(self):
        """At h = 1 the log rate is -6 + 0.5 (2005 - x - 1996)."""
        cube = simulate_paths(_deterministic_apc(), horizon=1, n_sims=100, seed=9)
        expected = -6.0 + 0.5 * (2005 - np.arange(5) - 1996)
        np.testing.assert_allclose(np.log(cube[0, :, 0]), expected, atol=1e-12)


class TestSimulatePaths:
    """Tests for simulate_paths."""

    def test_deterministic(self, lc_fit):
        """Same seed, same paths."""
        first = simulate_paths(lc_fit, horizon=5, n_sims=100, seed=42)
        second = simulate_paths(lc_fit, horizon=5, n_sims=100, seed=42)
        assert np.array_equal(first, second)

    def test_prefix_stable(self, lc_fit):
        """The first 100 of 200 paths equal a 100-path run."""
        small = simulate_paths(lc_fit, horizon=4, n_sims=100, seed=3)
        large = simulate_paths(lc_fit, horizon=4, n_sims=200, seed=3)
        assert np.array_equal(large[:100], small)

    def test_seed_changes_paths(self, lc_fit):
        """Different seeds give different paths."""
        a = simulate_paths(lc_fit, horizon=2, n_sims=100, seed=1)
        b = simulate_paths(lc_fit, horizon=2, n_sims=100, seed=2)
        assert not np.array_equal(a, b)

    def test_shape_and_positivity(self, lc_fit):
        """Cube is [sim, age, h] and every rate is positive."""
        cube = simulate_paths(lc_fit, horizon=6, n_sims=120, seed=0)
        assert cube.shape == (120, 41, 6)
        assert np.all(cube > 0)

    def test_age_subset_matches_full(self, lc_fit):
        """Reconstructing a subset of ages reuses the same draws."""
        full = simulate_paths(lc_fit, horizon=3, n_sims=100, seed=5)
        subset = simulate_paths(lc_fit, horizon=3, n_sims=100, seed=5, ages=[70, 71])
        assert np.array_equal(subset, full[:, 10:12, :])

    def test_unknown_ages(self, lc_fit):
        """Ages outside the fit raise BadDims."""
        with pytest.raises(BadDims):
            simulate_paths(lc_fit, horizon=2, n_sims=100, seed=0, ages=[59])

    def test_bad_inputs(self, lc_fit):
        """Horizon < 1 or fewer than 100 paths are refused."""
        with pytest.raises(BadDims):
            simulate_paths(lc_fit, horizon=0, n_sims=100, seed=0)
        with pytest.raises(BadDims):
            simulate_paths(lc_fit, horizon=1, n_sims=99, seed=0)

    def test_not_converged(self):
        """Unconverged fits are never forecast."""
        fitted = replace(_deterministic_apc(), converged=False)
        with pytest.raises(NotConverged):
            simulate_paths(fitted, horizon=1, n_sims=100, seed=0)

    def test_draw_rows_independent_of_count(self):
        """Row s of the draw matrix depends on (seed, s) only."""
        assert np.array_equal(standard_normal_draws(7, 3, 4), standard_normal_draws(7, 5, 4)[:3])


class TestMakeForecast:
    """Tests for make_forecast."""

    def test_bounds_ordered(self, lc_fit):
        """lower <= point <= upper everywhere."""
        result = make_forecast(lc_fit, horizon=5, n_sims=500, seed=1)
        assert np.all(result.lower <= result.point)
        assert np.all(result.point <= result.upper)
        assert result.horizons.tolist() == [1, 2, 3, 4, 5]
        assert result.generator == "PCG64"

    def test_bad_alpha(self, lc_fit):
        """alpha must lie in (0, 1)."""
        with pytest.raises(BadDims):
            make_forecast(lc_fit, horizon=1, alpha=1.0, n_sims=100)

    def test_matches_closed_form(self, lc_fit):
        """Simulated quantiles sit within 10% of the closed-form width."""
        simulated = make_forecast(lc_fit, horizon=10, alpha=0.2, n_sims=5000, seed=11)
        exact = gaussian_bounds(lc_fit, horizon=10, alpha=0.2)
        width = exact.upper - exact.lower
        assert np.all(np.abs(simulated.lower - exact.lower) <= 0.1 * width)
        assert np.all(np.abs(simulated.upper - exact.upper) <= 0.1 * width)
        assert np.all(np.abs(simulated.point - exact.point) <= 0.1 * width)

    def test_truncate(self, lc_fit):
        """Truncation keeps the requested ages only."""
        result = make_forecast(lc_fit, horizon=2, n_sims=100, seed=1)
        cut = result.truncate(AgeRange(90, 100, True))
        assert cut.ages.tolist() == list(range(90, 101))
        assert np.array_equal(cut.point, result.point[30:])

    def test_cohort_model_forecast(self):
        """APC forecasts on a real fit produce finite positive bounds."""
        surface = smooth_surface(ages=np.arange(60, 101), years=np.arange(1990, 2010))
        fitted = fit_apc(surface)
        result = make_forecast(fitted, horizon=8, n_sims=200, seed=2)
        assert result.point.shape == (41, 8)
        assert np.all(np.isfinite(result.upper)) and np.all(result.lower > 0)


class TestGaussianBounds:
    """Tests for gaussian_bounds."""

    def test_refuses_multi_index(self, retiree_lc_surface):
        """Two-component fits have no closed form here."""
        with pytest.raises(BadDims):
            gaussian_bounds(fit_lc_gaussian(retiree_lc_surface, n_components=2), horizon=1)

    def test_refuses_cohort(self):
        """Cohort models have no closed form here."""
        with pytest.raises(BadDims):
            gaussian_bounds(_deterministic_apc(), horizon=1)

    def test_width_grows_with_horizon(self, lc_fit):
        """Log-scale width grows like sqrt(h)."""
        result = gaussian_bounds(lc_fit, horizon=4)
        log_width = np.log(result.upper) - np.log(result.lower)
        ratio = log_width[:, 3] / log_width[:, 0]
        np.testing.assert_allclose(ratio, 2.0)


@pytest.mark.slow
class TestCalibration:
    """Coverage of the simulated intervals for a known random walk."""

    def test_one_step_coverage(self):
        """80% intervals cover the next value in 72%..88% of 500 replications."""
        rng = np.random.default_rng(2020)
        n_years = 50
        hits = 0
        for rep in range(500):
            path = np.cumsum(-0.02 + 0.05 * rng.standard_normal(n_years + 1))
            fitted = FittedModel(
                spec=ModelSpec(ModelKind.LC_GAUSSIAN),
                ages=[0],
                years=np.arange(1960, 1960 + n_years),
                alpha=[0.0],
                beta=(np.ones(1),),
                kappa=(path[:n_years],),
            )
            result = make_forecast(fitted, horizon=1, alpha=0.2, n_sims=400, seed=rep)
            actual = np.exp(path[n_years])
            hits += int(result.lower[0, 0] <= actual <= result.upper[0, 0])
        assert 0.72 <= hits / 500 <= 0.88
