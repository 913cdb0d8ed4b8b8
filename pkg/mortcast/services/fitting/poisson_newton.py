"""Cycled one-dimensional Newton updates for Poisson log-bilinear models.

All Poisson fitters share the form

    D[x, t] ~ Poisson(E[x, t] * exp(eta[x, t]))
    eta = alpha[x] + sum_j beta_j[x] * kappa_j[t] + gamma[t - x]

Each block (alpha, one kappa, one free beta, gamma) groups its parameters
so that every cell depends on exactly one parameter of the block. The
log-likelihood therefore splits into per-parameter pieces, and a Newton
step with step-halving on each piece can never lower the total.

The objective is the log-likelihood relative to the saturated model,
sum(D log(mu / D) - (mu - D)), i.e. minus half the deviance.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mortcast.exceptions import MissingCounts, NonFiniteObjective
from mortcast.logging_config import get_logger
from mortcast.models.surface import MortalitySurface

logger = get_logger(__name__)

MAX_HALVINGS = 40


@dataclass(frozen=True)
class PoissonData:
    """Death counts and exposures on one grid."""

    deaths: np.ndarray
    exposures: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.deaths.shape


def poisson_data(surface: MortalitySurface) -> PoissonData:
    """Extract counts for Poisson fitting.

    Deaths are synthesised as rate x exposure when only exposures exist.

    Raises:
        MissingCounts: No exposures on the surface
        NonFiniteObjective: A cell has deaths but zero exposure, or a
            non-finite count
    """
    label = f"{surface.country_code}/{surface.sex.value}"
    if surface.exposures is None:
        raise MissingCounts([f"{label}: Poisson models need exposures"])
    exposures = np.asarray(surface.exposures, dtype=float)
    if surface.deaths is None:
        logger.info(f"{label}: deaths synthesised as rate x exposure")
        deaths = np.asarray(surface.rates, dtype=float) * exposures
    else:
        deaths = np.asarray(surface.deaths, dtype=float)
    if not (np.all(np.isfinite(deaths)) and np.all(np.isfinite(exposures))):
        raise NonFiniteObjective([f"{label}: counts contain non-finite values"])
    if np.any(deaths < 0) or np.any(exposures < 0):
        raise NonFiniteObjective([f"{label}: counts must be non-negative"])
    bad = (deaths > 0) & (exposures <= 0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NonFiniteObjective(
            [f"{label}: {deaths[i, j]:g} deaths with zero exposure at age "
             f"{int(surface.ages[i])}, year {int(surface.years[j])}"]
        )
    return PoissonData(deaths=deaths, exposures=exposures)


def cell_objective(data: PoissonData, eta: np.ndarray) -> np.ndarray:
    """Per-cell contribution D log(mu / D) - (mu - D); zero-death cells give -mu.

    Cells with deaths are evaluated as -D (expm1(l) - l), l = log(mu / D),
    so the value stays accurate to far below 1e-8 near the saturated fit.
    """
    d, e = data.deaths, data.exposures
    positive = d > 0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        log_ratio = np.log(np.where(positive, e, 1.0)) + eta - np.log(np.where(positive, d, 1.0))
        gap = np.where(positive, d * (np.expm1(log_ratio) - log_ratio), 0.0)
        mu = np.where(positive, 0.0, e * np.exp(eta))
        return -gap - mu


def total_objective(data: PoissonData, eta: np.ndarray) -> float:
    return float(np.sum(cell_objective(data, eta)))


def newton_block(
    data: PoissonData,
    eta: np.ndarray,
    loading: np.ndarray,
    groups: np.ndarray,
    n_groups: int,
    active: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One Newton step for every parameter of a block.

    Args:
        data: Counts
        eta: Current linear predictor
        loading: d eta / d theta_g for each cell (broadcast to eta's shape)
        groups: Index of the block parameter each cell depends on
        n_groups: Number of parameters in the block
        active: Mask of parameters allowed to move (others keep step 0)

    Returns:
        (step per parameter, updated eta). Each parameter's own piece of the
        objective does not decrease: steps are halved until it does not,
        and dropped after MAX_HALVINGS.
    """
    loading = np.broadcast_to(loading, eta.shape)
    flat_groups = groups.ravel()
    with np.errstate(over="ignore", invalid="ignore"):
        mu = data.exposures * np.exp(eta)
    score = np.bincount(flat_groups, ((data.deaths - mu) * loading).ravel(), n_groups)
    info = np.bincount(flat_groups, (mu * loading**2).ravel(), n_groups)

    usable = info > 0
    if active is not None:
        usable &= active
    step = np.where(usable, score / np.where(usable, info, 1.0), 0.0)

    old = np.bincount(flat_groups, cell_objective(data, eta).ravel(), n_groups)
    trial = eta + step[groups] * loading
    for _ in range(MAX_HALVINGS):
        new = np.bincount(flat_groups, cell_objective(data, trial).ravel(), n_groups)
        worse = ~(new >= old)
        if not worse.any():
            return step, trial
        step = np.where(worse, step / 2.0, step)
        trial = eta + step[groups] * loading

    new = np.bincount(flat_groups, cell_objective(data, trial).ravel(), n_groups)
    step = np.where(~(new >= old), 0.0, step)
    return step, eta + step[groups] * loading


@dataclass
class BilinearState:
    """Mutable parameter set updated in place by `fit_bilinear`."""

    alpha: np.ndarray
    betas: list[np.ndarray]
    kappas: list[np.ndarray]
    gamma: Optional[np.ndarray] = None
    cohort_index: Optional[np.ndarray] = None

    def eta(self) -> np.ndarray:
        eta = np.repeat(self.alpha[:, None], self.kappas[0].size, axis=1)
        for b, k in zip(self.betas, self.kappas):
            eta = eta + np.outer(b, k)
        if self.gamma is not None:
            eta = eta + self.gamma[self.cohort_index]
        return eta


@dataclass(frozen=True)
class NewtonOutcome:
    trace: tuple[float, ...]
    converged: bool
    n_iter: int


def fit_bilinear(
    data: PoissonData,
    state: BilinearState,
    free_beta: bool,
    cohort_mask: Optional[np.ndarray],
    max_iter: int,
    tol: float,
    label: str = "",
) -> NewtonOutcome:
    """Cycle Newton updates alpha -> kappa_j -> beta_j -> gamma until stable.

    Convergence: the absolute objective change over a sweep is below tol.

    Raises:
        NonFiniteObjective: The objective is not finite at the start or
            after a sweep
    """
    p, n = data.shape
    rows = np.repeat(np.arange(p)[:, None], n, axis=1)
    cols = np.repeat(np.arange(n)[None, :], p, axis=0)

    eta = state.eta()
    objective = total_objective(data, eta)
    if not np.isfinite(objective):
        raise NonFiniteObjective([f"{label}: objective is not finite at the starting values"])
    trace = [objective]
    converged = False
    sweeps = 0

    for sweeps in range(1, max_iter + 1):
        step, eta = newton_block(data, eta, 1.0, rows, p)
        state.alpha = state.alpha + step

        for j in range(len(state.kappas)):
            step, eta = newton_block(data, eta, state.betas[j][:, None], cols, n)
            state.kappas[j] = state.kappas[j] + step

        if free_beta:
            for j in range(len(state.betas)):
                step, eta = newton_block(data, eta, state.kappas[j][None, :], rows, p)
                state.betas[j] = state.betas[j] + step

        if state.gamma is not None:
            step, eta = newton_block(
                data, eta, 1.0, state.cohort_index, state.gamma.size, active=cohort_mask
            )
            state.gamma = state.gamma + step

        objective = total_objective(data, eta)
        if not np.isfinite(objective):
            raise NonFiniteObjective([f"{label}: objective became non-finite at sweep {sweeps}"])
        change = objective - trace[-1]
        trace.append(objective)
        if abs(change) < tol:
            converged = True
            break

    if converged:
        logger.debug(f"{label}: converged after {sweeps} sweeps, objective {objective:.6f}")
    else:
        logger.warning(f"{label}: no convergence after {max_iter} sweeps (objective {objective:.6f})")
    return NewtonOutcome(trace=tuple(trace), converged=converged, n_iter=sweeps)
