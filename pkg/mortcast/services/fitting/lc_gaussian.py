"""Lee-Carter with Gaussian errors: SVD of the centred log-rate matrix."""
import numpy as np

from mortcast.exceptions import DegenerateSurface, NonFiniteObjective
from mortcast.logging_config import get_logger
from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.surface import MortalitySurface
from mortcast.validators.surface_validators import validate_fit_surface

logger = get_logger(__name__)

_ZERO_SINGULAR = 1e-12


def normalize_component(b: np.ndarray, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rescale one (b, k) pair to sum(b) = 1, k absorbing the scale.

    A component with sum(b) == 0 cannot be put on that gauge; it is scaled
    to unit norm with the first nonzero element of b positive instead.
    """
    total = b.sum()
    if abs(total) > _ZERO_SINGULAR * max(1.0, np.abs(b).sum()):
        return b / total, k * total
    norm = np.linalg.norm(b)
    if norm == 0:
        return np.full_like(b, 1.0 / b.size), np.zeros_like(k)
    first = b[np.flatnonzero(b)[0]]
    scale = norm * np.sign(first)
    return b / scale, k * scale


def svd_components(centred: np.ndarray, n_components: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Leading singular triplets as normalised (b, k) pairs."""
    u, s, vt = np.linalg.svd(centred, full_matrices=False)
    betas, kappas = [], []
    p, n = centred.shape
    for j in range(n_components):
        if j >= s.size or s[j] <= _ZERO_SINGULAR * max(1.0, s[0] if s.size else 0.0):
            # Zero-variance component: tie-break to flat loadings, null index
            betas.append(np.full(p, 1.0 / p))
            kappas.append(np.zeros(n))
            continue
        b, k = normalize_component(u[:, j].copy(), s[j] * vt[j].copy())
        betas.append(b)
        kappas.append(k)
    return betas, kappas


def surface_log_rates(surface: MortalitySurface) -> np.ndarray:
    """log m[x, t], requiring every rate to be positive and finite.

    Raises:
        NonFiniteObjective: The surface still holds zero or missing rates
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        log_m = np.log(surface.rates)
    if not np.all(np.isfinite(log_m)):
        raise NonFiniteObjective(
            [f"{surface.country_code}/{surface.sex.value}: log rates are not finite; "
             "clean the surface before fitting"]
        )
    return log_m


def fit_lc_gaussian(surface: MortalitySurface, n_components: int = 1, spec: ModelSpec = None) -> FittedModel:
    """Fit log m = a_x + sum_j b_x^(j) k_t^(j) + e by least squares.

    a_x is the row mean of the log rates; the components are the leading
    singular triplets of the centred matrix, each normalised to
    sum(b) = 1. Any mean left in a later component's k is moved into a_x.

    Args:
        surface: Cleaned surface (rates in (0, 1])
        n_components: 1 or 2
        spec: Optional spec to record (defaults to the matching LC kind)

    Returns:
        FittedModel with sigma2 = SSE / (p * n) and objective -SSE / 2
    """
    if n_components not in (1, 2):
        raise ValueError("n_components must be 1 or 2")
    if spec is None:
        kind = ModelKind.LC_GAUSSIAN if n_components == 1 else ModelKind.LC_GAUSSIAN2
        spec = ModelSpec(kind=kind)
    validate_fit_surface(surface).raise_for(DegenerateSurface)
    log_m = surface_log_rates(surface)

    alpha = log_m.mean(axis=1)
    centred = log_m - alpha[:, None]
    betas, kappas = svd_components(centred, n_components)

    for j in range(len(kappas)):
        shift = kappas[j].mean()
        if shift != 0.0:
            alpha = alpha + betas[j] * shift
            kappas[j] = kappas[j] - shift

    fitted = alpha[:, None] + sum(np.outer(b, k) for b, k in zip(betas, kappas))
    sse = float(np.sum((log_m - fitted) ** 2))
    p, n = log_m.shape
    logger.debug(
        f"{surface.country_code}/{surface.sex.value} {spec.kind.value}: SSE={sse:.6g}"
    )

    return FittedModel(
        spec=spec,
        ages=surface.ages,
        years=surface.years,
        alpha=alpha,
        beta=tuple(betas),
        kappa=tuple(kappas),
        sigma2=sse / (p * n),
        loglik_trace=(-0.5 * sse,),
        converged=True,
        n_iter=1,
        country_code=surface.country_code,
        sex=surface.sex,
    )
