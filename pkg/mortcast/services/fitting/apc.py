"""Age-period-cohort model with Poisson errors.

log m[x, t] = a_x + k_t + gamma_{t-x}, with sum(k) = 0, sum(gamma) = 0 and
sum(c * gamma) = 0 over the stored cohorts.
"""
import numpy as np

from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.surface import MortalitySurface
from mortcast.services.fitting.cohort import fit_age_period_cohort


def fit_apc(surface: MortalitySurface, spec: ModelSpec = None) -> FittedModel:
    """Fit the APC model by cycled Newton updates on a, k and gamma.

    The constant and linear cohort trends are rotated into a and k after
    convergence; the fitted log rates are unaffected.

    Examples:
        >>> fitted = fit_apc(surface)
        >>> abs(float(fitted.gamma.sum())) < 1e-8
        True
    """
    spec = spec or ModelSpec(kind=ModelKind.APC)
    betas = [np.ones(surface.ages.size)]
    return fit_age_period_cohort(surface, spec, betas, quadratic=False)
