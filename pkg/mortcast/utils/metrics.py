"""Forecast error criteria.

Matrices are indexed [age, forecast column]; p is the number of ages and
n the number of pooled forecast columns.
"""
import numpy as np
from numpy.typing import ArrayLike

from mortcast.exceptions import BadDims, DimMismatch, InvertedBounds, ZeroActual


def _pair(actual: ArrayLike, predicted: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.shape != predicted.shape:
        raise DimMismatch([f"Shapes differ: actual {actual.shape}, predicted {predicted.shape}"])
    if actual.size == 0:
        raise DimMismatch(["Cannot score an empty forecast set"])
    if np.any(actual <= 0):
        raise ZeroActual(["Observed rates must be strictly positive for percentage errors"])
    return actual, predicted


def mape(actual: ArrayLike, predicted: ArrayLike) -> float:
    """Mean absolute percentage error (in %).

    Examples:
        >>> mape([[0.01], [0.02]], [[0.011], [0.018]])
        10.0
    """
    actual, predicted = _pair(actual, predicted)
    return float(np.mean(np.abs((actual - predicted) / actual)) * 100)


def rmspe(actual: ArrayLike, predicted: ArrayLike, outside_root: bool = False) -> float:
    """Root mean squared percentage error.

    The default places the x100 inside the square root, i.e.
    sqrt(mean(((m - m_hat) / m)^2) * 100). With `outside_root=True` the
    conventional sqrt(mean(...)) * 100 is returned instead.

    Examples:
        >>> rmspe([[0.02]], [[0.018]])
        1.0
    """
    actual, predicted = _pair(actual, predicted)
    mean_sq = float(np.mean(((actual - predicted) / actual) ** 2))
    if outside_root:
        return float(np.sqrt(mean_sq) * 100)
    return float(np.sqrt(mean_sq * 100))


def interval_score(lb: ArrayLike, ub: ArrayLike, y: ArrayLike, alpha: float):
    """Interval score of a central (1 - alpha) prediction interval.

    S = (ub - lb) + 2/alpha * (lb - y) * 1{y < lb} + 2/alpha * (y - ub) * 1{y > ub}

    Returns a float for scalar inputs and an array otherwise.

    Raises:
        BadDims: alpha outside (0, 1)
        InvertedBounds: Any lower bound above its upper bound

    Examples:
        >>> interval_score(1.0, 2.0, 0.9, 0.2)
        2.0
    """
    if not 0 < alpha < 1:
        raise BadDims([f"alpha must lie in (0, 1), got {alpha}"])
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(lb > ub):
        raise InvertedBounds(["Lower bound exceeds upper bound"])
    below = np.where(y < lb, lb - y, 0.0)
    above = np.where(y > ub, y - ub, 0.0)
    score = (ub - lb) + (2.0 / alpha) * below + (2.0 / alpha) * above
    return float(score) if score.ndim == 0 else score


def mean_interval_score(lb: ArrayLike, ub: ArrayLike, y: ArrayLike, alpha: float) -> float:
    """Mean interval score over all ages and forecast columns (unscaled).

    Examples:
        >>> mean_interval_score([[1.0], [1.0]], [[2.0], [2.0]], [[1.5], [0.9]], 0.2)
        1.5
    """
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (lb.shape == ub.shape == y.shape):
        raise DimMismatch(
            [f"Shapes differ: lb {lb.shape}, ub {ub.shape}, observed {y.shape}"]
        )
    if y.size == 0:
        raise DimMismatch(["Cannot score an empty forecast set"])
    return float(np.mean(interval_score(lb, ub, y, alpha)))
