"""Cohort bookkeeping and identifiability rotation for APC and Plat.

Cohorts are labelled c = t - x and stored over the full range
years[0] - ages[-1] .. years[-1] - ages[0].

With u = t - t0, v = x - xbar and the centred cohort c~ = u - v, the
log-rate surface is unchanged when gamma loses psi1 + psi2 c~ + psi3 c~^2
and the age/period terms gain it back:

    alpha  += psi1 - psi2 v + psi3 v^2
    kappa1 += psi2 u + psi3 u^2
    kappa2 += 2 psi3 u            (kappa2 carries the loading xbar - x)

`rotate_cohort_trend` picks psi as the least-squares projection of gamma
on (1, c~[, c~^2]) so the rotated gamma is orthogonal to those columns.
"""
from dataclasses import dataclass

import numpy as np

from mortcast.exceptions import DegenerateSurface
from mortcast.logging_config import get_logger
from mortcast.models.fitted import FittedModel, ModelSpec
from mortcast.models.surface import MortalitySurface
from mortcast.services.fitting.lc_gaussian import surface_log_rates
from mortcast.services.fitting.poisson_newton import BilinearState, fit_bilinear, poisson_data
from mortcast.validators.surface_validators import validate_fit_surface

logger = get_logger(__name__)

REFINEMENT_PASSES = 2


@dataclass(frozen=True)
class CohortLayout:
    """Cohort labels for a training grid and each cell's cohort position."""

    cohorts: np.ndarray
    index: np.ndarray
    counts: np.ndarray

    def mask(self, min_cells: int) -> np.ndarray:
        """True for cohorts seen in at least `min_cells` cells."""
        return self.counts >= min_cells


def cohort_layout(ages: np.ndarray, years: np.ndarray) -> CohortLayout:
    """Lay out the cohorts of an ages x years grid.

    Examples:
        >>> layout = cohort_layout(np.arange(60, 63), np.arange(2000, 2004))
        >>> layout.cohorts[0], layout.cohorts[-1]
        (1938, 1943)
    """
    ages = np.asarray(ages, dtype=np.int64)
    years = np.asarray(years, dtype=np.int64)
    first = int(years[0] - ages[-1])
    last = int(years[-1] - ages[0])
    cohorts = np.arange(first, last + 1, dtype=np.int64)
    index = (years[None, :] - ages[:, None]) - first
    counts = np.bincount(index.ravel(), minlength=cohorts.size)
    return CohortLayout(cohorts=cohorts, index=index, counts=counts)


def cohort_basis(cohorts: np.ndarray, quadratic: bool) -> tuple[np.ndarray, float]:
    """Columns (1, c~[, c~^2]) with c~ = c - mean(c), and the centre used."""
    centre = float(np.mean(cohorts))
    c = np.asarray(cohorts, dtype=float) - centre
    columns = [np.ones_like(c), c]
    if quadratic:
        columns.append(c**2)
    return np.column_stack(columns), centre


def project_on_basis(gamma: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Least-squares coefficients of gamma on `basis`, refined twice."""
    q, r = np.linalg.qr(basis)
    psi = np.linalg.solve(r, q.T @ gamma)
    for _ in range(REFINEMENT_PASSES):
        residual = gamma - basis @ psi
        psi = psi + np.linalg.solve(r, q.T @ residual)
    return psi


def rotate_cohort_trend(
    state: BilinearState,
    ages: np.ndarray,
    years: np.ndarray,
    cohorts: np.ndarray,
    x_bar: float,
    quadratic: bool,
) -> np.ndarray:
    """Move the constant/linear(/quadratic) cohort trend into alpha and kappa.

    Requires state.betas[0] == 1 and, when `quadratic`, state.betas[1] ==
    xbar - ages. Updates `state` in place and returns psi.
    """
    basis, centre = cohort_basis(cohorts, quadratic)
    psi = project_on_basis(state.gamma, basis)
    if not quadratic:
        psi = np.append(psi, 0.0)

    t0 = centre + x_bar
    u = np.asarray(years, dtype=float) - t0
    v = np.asarray(ages, dtype=float) - x_bar

    c = np.asarray(cohorts, dtype=float) - centre
    state.gamma = state.gamma - (psi[0] + psi[1] * c + psi[2] * c**2)
    state.alpha = state.alpha + psi[0] - psi[1] * v + psi[2] * v**2
    state.kappas[0] = state.kappas[0] + psi[1] * u + psi[2] * u**2
    if quadratic:
        state.kappas[1] = state.kappas[1] + 2.0 * psi[2] * u
    return psi


def centre_kappas(state: BilinearState) -> None:
    """Shift each kappa to mean zero, moving the level into alpha."""
    for j, kappa in enumerate(state.kappas):
        mean = float(np.mean(kappa))
        state.kappas[j] = kappa - mean
        state.alpha = state.alpha + state.betas[j] * mean


def _starting_state(
    log_m: np.ndarray, betas: list[np.ndarray], layout: CohortLayout, mask: np.ndarray
) -> BilinearState:
    """Least-squares pass on log rates: alpha, each kappa in turn, then gamma."""
    alpha = log_m.mean(axis=1)
    residual = log_m - alpha[:, None]
    kappas = []
    for beta in betas:
        kappa = beta @ residual / float(beta @ beta)
        residual = residual - np.outer(beta, kappa)
        kappas.append(kappa)
    sums = np.bincount(layout.index.ravel(), residual.ravel(), layout.cohorts.size)
    gamma = np.where(mask, sums / np.maximum(layout.counts, 1), 0.0)
    return BilinearState(
        alpha=alpha, betas=list(betas), kappas=kappas, gamma=gamma, cohort_index=layout.index
    )


def fit_age_period_cohort(
    surface: MortalitySurface,
    spec: ModelSpec,
    betas: list[np.ndarray],
    quadratic: bool,
) -> FittedModel:
    """Poisson fit of alpha + sum_j beta_j kappa_j + gamma with fixed betas.

    betas[0] must be the constant loading; when `quadratic` betas[1] must
    be xbar - x. Cohorts with fewer than spec.min_cohort_cells cells keep
    gamma at 0 during fitting and take their rotated value afterwards.

    Raises:
        DegenerateSurface: Fewer than 3 years or ages
        MissingCounts: No exposures
        NonFiniteObjective: Deaths recorded against zero exposure
    """
    validate_fit_surface(surface).raise_for(DegenerateSurface)
    data = poisson_data(surface)
    label = f"{surface.country_code}/{surface.sex.value} {spec.kind.value}"

    layout = cohort_layout(surface.ages, surface.years)
    mask = layout.mask(spec.min_cohort_cells)
    n_thin = int((~mask).sum())
    if n_thin:
        logger.debug(f"{label}: {n_thin} thin cohorts fixed at gamma = 0")

    x_bar = float(np.mean(surface.ages))
    state = _starting_state(surface_log_rates(surface), betas, layout, mask)
    outcome = fit_bilinear(
        data, state, free_beta=False, cohort_mask=mask,
        max_iter=spec.max_iter, tol=spec.tol, label=label,
    )

    rotate_cohort_trend(state, surface.ages, surface.years, layout.cohorts, x_bar, quadratic)
    centre_kappas(state)

    logger.info(
        f"{label}: objective {outcome.trace[-1]:.6f} after {outcome.n_iter} sweeps"
        f"{'' if outcome.converged else ' (not converged)'}"
    )
    return FittedModel(
        spec=spec,
        ages=surface.ages,
        years=surface.years,
        alpha=state.alpha,
        beta=tuple(state.betas),
        kappa=tuple(state.kappas),
        gamma=state.gamma,
        cohorts=layout.cohorts,
        cohort_mask=mask,
        loglik_trace=outcome.trace,
        converged=outcome.converged,
        n_iter=outcome.n_iter,
        x_bar=x_bar,
        country_code=surface.country_code,
        sex=surface.sex,
    )
