"""Model fitting factory.

Maps a ModelSpec to the fitter for its kind, so callers hold a spec and
never import a concrete fitter.
"""

from mortcast.exceptions import DegenerateSurface
from mortcast.logging_config import get_logger
from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.surface import MortalitySurface
from mortcast.services.fitting.apc import fit_apc
from mortcast.services.fitting.lc_gaussian import fit_lc_gaussian
from mortcast.services.fitting.lc_poisson import fit_lc_poisson
from mortcast.services.fitting.plat import fit_plat
from mortcast.validators.surface_validators import validate_fit_surface

logger = get_logger(__name__)


def fit(spec: ModelSpec, surface: MortalitySurface) -> FittedModel:
    """Fit the model named by `spec` to `surface`.

    Args:
        spec: Model kind and optimizer settings
        surface: Cleaned surface (rates in (0, 1]); Poisson kinds also
            need exposures

    Returns:
        FittedModel satisfying the kind's normalisation constraints

    Raises:
        DegenerateSurface: Fewer than 3 years or 3 ages
        MissingCounts: Poisson kind on a surface without exposures
        NonFiniteObjective: Deaths against zero exposure, or unclean rates

    Example:
        >>> fitted = fit(ModelSpec(ModelKind.PLAT), retiree_surface)
        >>> fitted.spec.plat_period_terms
        2
    """
    result = validate_fit_surface(surface).raise_for(DegenerateSurface)
    for warning in result.warnings:
        logger.warning(warning)

    kind = ModelKind(spec.kind)
    if kind is ModelKind.LC_GAUSSIAN:
        return fit_lc_gaussian(surface, n_components=1, spec=spec)
    if kind is ModelKind.LC_GAUSSIAN2:
        return fit_lc_gaussian(surface, n_components=2, spec=spec)
    if kind is ModelKind.LC_POISSON:
        return fit_lc_poisson(surface, spec=spec)
    if kind is ModelKind.APC:
        return fit_apc(surface, spec=spec)
    if kind is ModelKind.PLAT:
        return fit_plat(surface, spec=spec)
    raise ValueError(f"Unknown model kind: {kind}")
