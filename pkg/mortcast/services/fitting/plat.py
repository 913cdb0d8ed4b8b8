"""Plat model with Poisson errors.

log m[x, t] = a_x + k1_t + (xbar - x) k2_t [+ (xbar - x)+ k3_t] + gamma_{t-x}

xbar is the mean training age. Every k sums to zero; gamma is orthogonal
to the constant, linear and quadratic cohort trends.
"""
import numpy as np

from mortcast.logging_config import get_logger
from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.surface import MortalitySurface
from mortcast.services.fitting.cohort import fit_age_period_cohort

logger = get_logger(__name__)


def plat_age_design(ages: np.ndarray, period_terms: int) -> list[np.ndarray]:
    """Fixed age loadings 1, xbar - x and (for 3 terms) max(xbar - x, 0).

    Examples:
        >>> [b.tolist() for b in plat_age_design(np.array([60, 61, 62]), 2)]
        [[1.0, 1.0, 1.0], [1.0, 0.0, -1.0]]
    """
    if period_terms not in (2, 3):
        raise ValueError(f"Plat uses 2 or 3 period terms, got {period_terms}")
    ages = np.asarray(ages, dtype=float)
    offset = ages.mean() - ages
    design = [np.ones_like(ages), offset]
    if period_terms == 3:
        design.append(np.maximum(offset, 0.0))
    return design


def fit_plat(surface: MortalitySurface, period_terms: int = None, spec: ModelSpec = None) -> FittedModel:
    """Fit the Plat model.

    Args:
        surface: Cleaned surface with exposures
        period_terms: 2 or 3; None resolves from spec, then from the lowest
            training age (3 below the retiree age, else 2)
        spec: Optimizer settings (defaults to ModelSpec(PLAT))

    Returns:
        FittedModel whose spec records the term count used
    """
    spec = spec or ModelSpec(kind=ModelKind.PLAT)
    if period_terms is None:
        period_terms = spec.resolve_period_terms(int(surface.ages[0]))
    elif spec.plat_period_terms not in (None, period_terms):
        raise ValueError(
            f"period_terms={period_terms} disagrees with spec ({spec.plat_period_terms})"
        )
    spec = spec.with_period_terms(period_terms)
    logger.debug(
        f"{surface.country_code}/{surface.sex.value} plat: {period_terms} period terms "
        f"on ages {int(surface.ages[0])}..{int(surface.ages[-1])}"
    )
    betas = plat_age_design(surface.ages, period_terms)
    return fit_age_period_cohort(surface, spec, betas, quadratic=True)
