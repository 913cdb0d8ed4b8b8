"""Lee-Carter with Poisson errors.

D[x, t] ~ Poisson(E[x, t] exp(a_x + b_x k_t)), fitted by cycled Newton
updates a -> k -> b starting from the Gaussian (SVD) fit, then normalised
to sum(b) = 1 and sum(k) = 0.
"""
import numpy as np

from mortcast.exceptions import DegenerateSurface
from mortcast.logging_config import get_logger
from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.surface import MortalitySurface
from mortcast.services.fitting.lc_gaussian import fit_lc_gaussian, normalize_component
from mortcast.services.fitting.poisson_newton import BilinearState, fit_bilinear, poisson_data
from mortcast.validators.surface_validators import validate_fit_surface

logger = get_logger(__name__)


def fit_lc_poisson(surface: MortalitySurface, spec: ModelSpec = None) -> FittedModel:
    """Fit the Poisson Lee-Carter model by maximum likelihood.

    Args:
        surface: Cleaned surface with exposures (deaths optional)
        spec: Optimizer settings (defaults to ModelSpec(LC_POISSON))

    Returns:
        FittedModel with sum(beta) = 1, sum(kappa) = 0 and the objective
        trace of every sweep

    Raises:
        DegenerateSurface: Fewer than 3 years or ages, or uncleaned rates
        MissingCounts: No exposures
        NonFiniteObjective: Deaths recorded against zero exposure

    Examples:
        >>> fitted = fit_lc_poisson(surface)
        >>> float(fitted.beta[0].sum())
        1.0
    """
    spec = spec or ModelSpec(kind=ModelKind.LC_POISSON)
    validate_fit_surface(surface).raise_for(DegenerateSurface)
    data = poisson_data(surface)
    label = f"{surface.country_code}/{surface.sex.value} {spec.kind.value}"

    start = fit_lc_gaussian(surface, n_components=1)
    state = BilinearState(
        alpha=np.array(start.alpha),
        betas=[np.array(start.beta[0])],
        kappas=[np.array(start.kappa[0])],
    )
    outcome = fit_bilinear(
        data, state, free_beta=True, cohort_mask=None,
        max_iter=spec.max_iter, tol=spec.tol, label=label,
    )

    beta, kappa = normalize_component(state.betas[0], state.kappas[0])
    shift = float(kappa.mean())
    alpha = state.alpha + beta * shift
    kappa = kappa - shift

    logger.info(
        f"{label}: objective {outcome.trace[-1]:.6f} after {outcome.n_iter} sweeps"
        f"{'' if outcome.converged else ' (not converged)'}"
    )
    return FittedModel(
        spec=spec,
        ages=surface.ages,
        years=surface.years,
        alpha=alpha,
        beta=(beta,),
        kappa=(kappa,),
        loglik_trace=outcome.trace,
        converged=outcome.converged,
        n_iter=outcome.n_iter,
        country_code=surface.country_code,
        sex=surface.sex,
    )
