"""Tests for forecast error criteria."""
import math

import numpy as np
import pytest

from mortcast.exceptions import BadDims, DimMismatch, InvertedBounds, ZeroActual
from mortcast.utils.metrics import interval_score, mape, mean_interval_score, rmspe


def _naive_mape(actual, predicted):
    p, n = actual.shape
    total = 0.0
    for i in range(p):
        for j in range(n):
            total += abs((actual[i, j] - predicted[i, j]) / actual[i, j])
    return total / (p * n) * 100


def _naive_rmspe(actual, predicted, outside_root=False):
    p, n = actual.shape
    total = 0.0
    for i in range(p):
        for j in range(n):
            total += ((actual[i, j] - predicted[i, j]) / actual[i, j]) ** 2
    mean_sq = total / (p * n)
    return math.sqrt(mean_sq) * 100 if outside_root else math.sqrt(mean_sq * 100)


def _naive_mis(lb, ub, y, alpha):
    p, n = y.shape
    total = 0.0
    for i in range(p):
        for j in range(n):
            score = ub[i, j] - lb[i, j]
            if y[i, j] < lb[i, j]:
                score += 2 / alpha * (lb[i, j] - y[i, j])
            if y[i, j] > ub[i, j]:
                score += 2 / alpha * (y[i, j] - ub[i, j])
            total += score
    return total / (p * n)


class TestAgainstBruteForce:
    """Vectorised metrics agree with double-loop re-implementations."""

    def test_random_matrices(self):
        """1000 random small matrices agree to 1e-12 relative."""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            p, n = rng.integers(1, 6, size=2)
            actual = rng.uniform(1e-4, 0.5, size=(p, n))
            predicted = actual * rng.uniform(0.7, 1.3, size=(p, n))
            half = actual * rng.uniform(0.0, 0.3, size=(p, n))
            centre = actual * rng.uniform(0.8, 1.2, size=(p, n))
            lb, ub = centre - half, centre + half
            alpha = float(rng.uniform(0.05, 0.5))

            assert mape(actual, predicted) == pytest.approx(_naive_mape(actual, predicted), rel=1e-12)
            assert rmspe(actual, predicted) == pytest.approx(_naive_rmspe(actual, predicted), rel=1e-12)
            assert rmspe(actual, predicted, outside_root=True) == pytest.approx(
                _naive_rmspe(actual, predicted, outside_root=True), rel=1e-12
            )
            assert mean_interval_score(lb, ub, actual, alpha) == pytest.approx(
                _naive_mis(lb, ub, actual, alpha), rel=1e-12
            )


class TestIntervalScoreProperties:
    """Structural properties of the interval score."""

    def test_positive_homogeneity(self):
        """Scaling bounds and observation by c > 0 scales the score by c."""
        rng = np.random.default_rng(31)
        for _ in range(200):
            y = rng.uniform(1e-4, 0.5, size=(4, 3))
            lb = y * rng.uniform(0.6, 1.2, size=y.shape)
            ub = lb * rng.uniform(1.0, 1.5, size=y.shape)
            alpha = float(rng.uniform(0.05, 0.5))
            c = float(rng.uniform(0.01, 100.0))

            np.testing.assert_allclose(
                interval_score(c * lb, c * ub, c * y, alpha),
                c * interval_score(lb, ub, y, alpha),
                rtol=1e-12,
            )
            assert mean_interval_score(c * lb, c * ub, c * y, alpha) == pytest.approx(
                c * mean_interval_score(lb, ub, y, alpha), rel=1e-12
            )

    def test_zero_width_interval_missing_below(self):
        """A point interval above the observation scores 2/alpha * distance."""
        assert interval_score(1.0, 1.0, 0.5, 0.2) == pytest.approx(5.0)

    def test_zero_width_interval_missing_above(self):
        """A point interval below the observation scores 2/alpha * distance."""
        assert interval_score(1.0, 1.0, 1.25, 0.5) == pytest.approx(1.0)

    def test_zero_width_intervals_elementwise(self):
        """Point intervals score only the penalty, cell by cell."""
        bound = np.array([0.01, 0.02, 0.03])
        y = np.array([0.012, 0.015, 0.03])
        scores = interval_score(bound, bound, y, 0.1)
        np.testing.assert_allclose(scores, 20.0 * np.abs(y - bound), rtol=1e-12)
        assert scores[2] == 0.0


class TestMape:
    """Tests for mape."""

    def test_known_value(self):
        """10% off in both cells gives 10."""
        assert mape([[0.01], [0.02]], [[0.011], [0.018]]) == pytest.approx(10.0)

    def test_perfect_forecast_is_zero(self):
        """Identical matrices score 0."""
        assert mape([[0.1, 0.2]], [[0.1, 0.2]]) == 0.0

    def test_shape_mismatch(self):
        """Different shapes raise DimMismatch."""
        with pytest.raises(DimMismatch):
            mape([[0.1, 0.2]], [[0.1], [0.2]])

    def test_empty_input(self):
        """Empty matrices raise DimMismatch."""
        with pytest.raises(DimMismatch):
            mape(np.empty((0, 3)), np.empty((0, 3)))

    def test_zero_actual(self):
        """A zero observed rate raises ZeroActual."""
        with pytest.raises(ZeroActual):
            mape([[0.0, 0.1]], [[0.1, 0.1]])


class TestRmspe:
    """Tests for rmspe conventions."""

    def test_factor_inside_root(self):
        """10% error everywhere: sqrt(0.01 * 100) = 1."""
        assert rmspe([[0.02]], [[0.018]]) == pytest.approx(1.0)

    def test_factor_outside_root(self):
        """Conventional form: sqrt(0.01) * 100 = 10."""
        assert rmspe([[0.02]], [[0.018]], outside_root=True) == pytest.approx(10.0)


class TestIntervalScore:
    """Tests for interval_score and mean_interval_score."""

    def test_inside_interval_is_width(self):
        """An observation inside the bounds scores the width."""
        assert interval_score(1.0, 2.0, 1.5, 0.2) == pytest.approx(1.0)

    def test_below_lower_bound(self):
        """Below: width + 2/alpha * shortfall."""
        assert interval_score(1.0, 2.0, 0.9, 0.2) == pytest.approx(2.0)

    def test_above_upper_bound(self):
        """Above: width + 2/alpha * excess."""
        assert interval_score(1.0, 2.0, 2.5, 0.5) == pytest.approx(3.0)

    def test_degenerate_interval(self):
        """Zero-width interval hitting the observation scores 0."""
        assert interval_score(1.0, 1.0, 1.0, 0.2) == 0.0

    def test_inverted_bounds(self):
        """lb > ub raises InvertedBounds."""
        with pytest.raises(InvertedBounds):
            interval_score([2.0], [1.0], [1.5], 0.2)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
    def test_alpha_outside_unit_interval(self, alpha):
        """alpha must lie strictly between 0 and 1."""
        with pytest.raises(BadDims, match="alpha must lie in"):
            interval_score(1.0, 2.0, 1.5, alpha)

    def test_mean_over_cells(self):
        """Mean of 1.0 (inside) and 2.0 (below) is 1.5."""
        assert mean_interval_score([[1.0], [1.0]], [[2.0], [2.0]], [[1.5], [0.9]], 0.2) == pytest.approx(1.5)

    def test_mean_shape_mismatch(self):
        """Bounds and observations must share a shape."""
        with pytest.raises(DimMismatch):
            mean_interval_score([[1.0]], [[2.0]], [[1.5], [1.5]], 0.2)
