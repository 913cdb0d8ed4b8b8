"""Model specification and fitted-parameter domain types."""
import enum
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from mortcast.config import settings
from mortcast.models.surface import Sex


class ModelKind(str, enum.Enum):
    """The five extrapolative models.

    Values double as CLI names and CSV identifiers.
    """

    LC_POISSON = "lc-poisson"
    LC_GAUSSIAN = "lc-gaussian"
    LC_GAUSSIAN2 = "lc-gaussian2"
    APC = "apc"
    PLAT = "plat"

    @property
    def label(self) -> str:
        return _MODEL_LABELS[self]

    @property
    def uses_poisson(self) -> bool:
        return self in (ModelKind.LC_POISSON, ModelKind.APC, ModelKind.PLAT)

    @property
    def has_cohort(self) -> bool:
        return self in (ModelKind.APC, ModelKind.PLAT)


_MODEL_LABELS = {
    ModelKind.LC_POISSON: "LC (Poisson)",
    ModelKind.LC_GAUSSIAN: "LC (Gaussian)",
    ModelKind.LC_GAUSSIAN2: "LC2 (Gaussian)",
    ModelKind.APC: "APC",
    ModelKind.PLAT: "Plat",
}


@dataclass(frozen=True)
class ModelSpec:
    """What to fit and how hard to try.

    Attributes:
        kind: Model family
        plat_period_terms: 2 or 3 period indices for Plat; None picks 3 on a
            range starting below the retiree age and 2 otherwise
        max_iter: Maximum Newton sweeps for Poisson fits
        tol: Convergence threshold on the objective change
        min_cohort_cells: Cohorts seen in fewer cells keep gamma fixed at 0
    """

    kind: ModelKind
    plat_period_terms: Optional[int] = None
    max_iter: int = settings.MAX_ITER
    tol: float = settings.TOL
    min_cohort_cells: int = settings.MIN_COHORT_CELLS

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.plat_period_terms not in (None, 2, 3):
            raise ValueError("plat_period_terms must be 2 or 3")
        if self.min_cohort_cells < 1:
            raise ValueError("min_cohort_cells must be at least 1")

    def resolve_period_terms(self, lowest_age: int) -> int:
        """Plat term count for a training range starting at `lowest_age`."""
        if self.plat_period_terms is not None:
            return self.plat_period_terms
        return 3 if lowest_age < settings.RETIREE_LOWER_AGE else 2

    def with_period_terms(self, terms: int) -> "ModelSpec":
        return replace(self, plat_period_terms=terms)


def _frozen(array) -> Optional[np.ndarray]:
    if array is None:
        return None
    out = np.array(array, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Estimated parameters of one model on one surface.

    Every model is stored in the common log-bilinear form

        log m[x, t] = alpha[x] + sum_j beta[j][x] * kappa[j][t] + gamma[t - x]

    For the LC models `beta` holds the estimated loadings; for APC and Plat
    it holds the fixed age designs (1, xbar - x, (xbar - x)+).

    Attributes:
        spec: The specification that produced the fit
        ages, years: Training grid
        alpha: Static age effect
        beta: Age loadings, one per period index
        kappa: Period indices
        gamma: Cohort effects over `cohorts` (None without cohort term)
        cohorts: Birth-cohort labels t - x, ascending
        cohort_mask: True where gamma was estimated (thin cohorts False)
        sigma2: Residual variance of Gaussian fits
        loglik_trace: Objective after each sweep
        converged: Whether the objective change fell below tolerance
        n_iter: Sweeps performed
        x_bar: Mean training age (Plat design centre)
        country_code, sex: Provenance of the training surface
    """

    spec: ModelSpec
    ages: np.ndarray
    years: np.ndarray
    alpha: np.ndarray
    beta: tuple[np.ndarray, ...]
    kappa: tuple[np.ndarray, ...]
    gamma: Optional[np.ndarray] = None
    cohorts: Optional[np.ndarray] = None
    cohort_mask: Optional[np.ndarray] = None
    sigma2: Optional[float] = None
    loglik_trace: tuple[float, ...] = field(default_factory=tuple)
    converged: bool = True
    n_iter: int = 0
    x_bar: Optional[float] = None
    country_code: str = ""
    sex: Optional[Sex] = None

    def __post_init__(self):
        object.__setattr__(self, "ages", np.array(self.ages, dtype=np.int64))
        object.__setattr__(self, "years", np.array(self.years, dtype=np.int64))
        object.__setattr__(self, "alpha", _frozen(self.alpha))
        object.__setattr__(self, "beta", tuple(_frozen(b) for b in self.beta))
        object.__setattr__(self, "kappa", tuple(_frozen(k) for k in self.kappa))
        object.__setattr__(self, "gamma", _frozen(self.gamma))
        if self.cohorts is not None:
            object.__setattr__(self, "cohorts", np.array(self.cohorts, dtype=np.int64))
        if self.cohort_mask is not None:
            object.__setattr__(self, "cohort_mask", np.array(self.cohort_mask, dtype=bool))
        object.__setattr__(self, "loglik_trace", tuple(float(v) for v in self.loglik_trace))
        if len(self.beta) != len(self.kappa):
            raise ValueError("beta and kappa must have the same number of components")

    @property
    def n_components(self) -> int:
        return len(self.kappa)

    @property
    def objective(self) -> float:
        return self.loglik_trace[-1] if self.loglik_trace else float("nan")

    @property
    def has_cohort(self) -> bool:
        return self.gamma is not None

    def cohort_grid(self) -> np.ndarray:
        """Gamma laid out on the training grid (zeros without cohort term)."""
        p, n = self.ages.size, self.years.size
        if self.gamma is None:
            return np.zeros((p, n))
        index = (self.years[None, :] - self.ages[:, None]) - self.cohorts[0]
        return self.gamma[index]

    def log_rates(self) -> np.ndarray:
        """Fitted log central death rates on the training grid."""
        eta = np.repeat(self.alpha[:, None], self.years.size, axis=1)
        for b, k in zip(self.beta, self.kappa):
            eta = eta + np.outer(b, k)
        return eta + self.cohort_grid()

    def fitted_rates(self) -> np.ndarray:
        return np.exp(self.log_rates())
