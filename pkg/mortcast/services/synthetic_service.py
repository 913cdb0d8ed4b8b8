"""Synthetic mortality surfaces drawn from known model parameters.

Used to exercise the full pipeline without HMD credentials and as the
simulation oracle for parameter-recovery tests.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from mortcast.exceptions import BadTruth
from mortcast.logging_config import get_logger
from mortcast.models.fitted import FittedModel, ModelKind, ModelSpec
from mortcast.models.surface import MortalitySurface, Sex
from mortcast.services.fitting.cohort import cohort_basis, cohort_layout, project_on_basis
from mortcast.services.fitting.plat import plat_age_design

logger = get_logger(__name__)

SYNTHETIC_YEARS = np.arange(1950, 2017)
SYNTHETIC_AGES = np.arange(0, 111)
CONSTRAINT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SyntheticTruth:
    """True parameters plus the exposures deaths are drawn against.

    Attributes:
        model: Parameters in the common log-bilinear form; `model.spec.kind`
            decides which constraints are checked
        exposures: Person-years per (age, year), shape of the model grid
    """

    model: FittedModel
    exposures: np.ndarray

    @property
    def rates(self) -> np.ndarray:
        return self.model.fitted_rates()


def _gompertz_makeham(ages: np.ndarray, sex: Sex) -> np.ndarray:
    """Baseline log rates: infant term + Makeham constant + Gompertz slope."""
    ages = np.asarray(ages, dtype=float)
    senescent = 2.0e-5 if sex is Sex.MALE else 1.2e-5
    makeham = 3.0e-4 if sex is Sex.MALE else 1.5e-4
    return np.log(0.02 * np.exp(-1.5 * ages) + makeham + senescent * np.exp(0.095 * ages))


def default_exposures(ages: ArrayLike, years: ArrayLike, scale: float = 1e5) -> np.ndarray:
    """Exposure grid shrinking with age like a survival curve (scale at age 0)."""
    ages = np.asarray(ages, dtype=float)
    survival = np.exp(-((ages / 85.0) ** 6))
    return scale * np.repeat(np.maximum(survival, 1e-4)[:, None], len(years), axis=1)


def _random_walk(n: int, drift: float, sigma: float, rng: np.random.Generator) -> np.ndarray:
    steps = drift + sigma * rng.standard_normal(n - 1)
    path = np.concatenate([[0.0], np.cumsum(steps)])
    return path - path.mean()


def _truth(
    kind: ModelKind,
    ages: np.ndarray,
    years: np.ndarray,
    alpha: np.ndarray,
    betas: list[np.ndarray],
    kappas: list[np.ndarray],
    exposures: np.ndarray,
    sex: Sex,
    gamma: Optional[np.ndarray] = None,
    x_bar: Optional[float] = None,
) -> SyntheticTruth:
    cohorts = cohort_layout(ages, years).cohorts if gamma is not None else None
    model = FittedModel(
        spec=ModelSpec(kind=kind, plat_period_terms=len(betas) if kind is ModelKind.PLAT else None),
        ages=ages,
        years=years,
        alpha=alpha,
        beta=tuple(betas),
        kappa=tuple(kappas),
        gamma=gamma,
        cohorts=cohorts,
        cohort_mask=None if gamma is None else np.ones(cohorts.size, dtype=bool),
        converged=True,
        x_bar=x_bar,
        country_code="SYN",
        sex=sex,
    )
    return SyntheticTruth(model=model, exposures=exposures)


def default_lc_truth(
    sex: Sex = Sex.FEMALE,
    seed: int = 0,
    ages: ArrayLike = SYNTHETIC_AGES,
    years: ArrayLike = SYNTHETIC_YEARS,
    exposure_scale: float = 1e5,
    drift: float = -1.2,
    sigma: float = 1.0,
) -> SyntheticTruth:
    """Lee-Carter truth with a declining period index.

    b_x falls linearly from young to old ages and sums to 1; k_t is a
    centred random walk with the given drift.
    """
    ages = np.asarray(ages, dtype=np.int64)
    years = np.asarray(years, dtype=np.int64)
    rng = np.random.default_rng(seed)
    weights = 1.2 - ages / max(float(ages[-1]), 1.0)
    beta = weights / weights.sum()
    kappa = _random_walk(years.size, drift, sigma, rng)
    return _truth(
        ModelKind.LC_POISSON, ages, years, _gompertz_makeham(ages, Sex.parse(sex)),
        [beta], [kappa], default_exposures(ages, years, exposure_scale), Sex.parse(sex),
    )


def _constrained_gamma(ages, years, amplitude: float, quadratic: bool) -> np.ndarray:
    """Smooth cohort wave orthogonal to the constant/linear(/quadratic) trends."""
    cohorts = cohort_layout(ages, years).cohorts
    phase = (cohorts - cohorts[0]) / max(cohorts.size - 1, 1)
    raw = amplitude * np.sin(2 * np.pi * 1.5 * phase)
    basis, _ = cohort_basis(cohorts, quadratic)
    return raw - basis @ project_on_basis(raw, basis)


def default_apc_truth(
    sex: Sex = Sex.FEMALE,
    seed: int = 0,
    ages: ArrayLike = SYNTHETIC_AGES,
    years: ArrayLike = SYNTHETIC_YEARS,
    exposure_scale: float = 1e5,
    cohort_amplitude: float = 0.05,
) -> SyntheticTruth:
    """APC truth: level index with drift -0.015 and a cohort wave."""
    ages = np.asarray(ages, dtype=np.int64)
    years = np.asarray(years, dtype=np.int64)
    rng = np.random.default_rng(seed)
    kappa = _random_walk(years.size, -0.015, 0.01, rng)
    gamma = _constrained_gamma(ages, years, cohort_amplitude, quadratic=False)
    return _truth(
        ModelKind.APC, ages, years, _gompertz_makeham(ages, Sex.parse(sex)),
        [np.ones(ages.size)], [kappa], default_exposures(ages, years, exposure_scale),
        Sex.parse(sex), gamma=gamma,
    )


def default_plat_truth(
    sex: Sex = Sex.FEMALE,
    seed: int = 0,
    period_terms: int = 3,
    ages: ArrayLike = SYNTHETIC_AGES,
    years: ArrayLike = SYNTHETIC_YEARS,
    exposure_scale: float = 1e5,
    cohort_amplitude: float = 0.05,
) -> SyntheticTruth:
    """Plat truth: level, slope (and young-age) indices plus a cohort wave."""
    ages = np.asarray(ages, dtype=np.int64)
    years = np.asarray(years, dtype=np.int64)
    rng = np.random.default_rng(seed)
    betas = plat_age_design(ages, period_terms)
    kappas = [_random_walk(years.size, -0.015, 0.01, rng),
              _random_walk(years.size, -2e-4, 2e-4, rng)]
    if period_terms == 3:
        kappas.append(_random_walk(years.size, -1e-4, 2e-4, rng))
    gamma = _constrained_gamma(ages, years, cohort_amplitude, quadratic=True)
    return _truth(
        ModelKind.PLAT, ages, years, _gompertz_makeham(ages, Sex.parse(sex)), betas, kappas,
        default_exposures(ages, years, exposure_scale), Sex.parse(sex),
        gamma=gamma, x_bar=float(np.mean(ages)),
    )


def validate_truth(truth: SyntheticTruth) -> list[str]:
    """Messages for every way `truth` breaks its model's constraints."""
    model = truth.model
    errors = []
    shape = (model.ages.size, model.years.size)
    if truth.exposures.shape != shape:
        errors.append(f"exposures have shape {truth.exposures.shape}, expected {shape}")
        return errors
    if not np.all(np.isfinite(truth.exposures)) or np.any(truth.exposures <= 0):
        errors.append("exposures must be finite and positive")

    arrays = [model.alpha, *model.beta, *model.kappa]
    if model.gamma is not None:
        arrays.append(model.gamma)
    if not all(np.all(np.isfinite(a)) for a in arrays):
        errors.append("parameters must be finite")
        return errors

    rates = truth.rates
    if np.any(rates <= 0) or np.any(rates > 1):
        errors.append(f"true rates must lie in (0, 1], range is {rates.min():.3g}..{rates.max():.3g}")

    for j, kappa in enumerate(model.kappa, start=1):
        if abs(kappa.sum()) > CONSTRAINT_TOL * max(1.0, np.abs(kappa).sum()):
            errors.append(f"kappa{j} must sum to 0, sums to {kappa.sum():.3g}")
    if not model.spec.kind.has_cohort:
        for j, beta in enumerate(model.beta, start=1):
            if abs(beta.sum() - 1.0) > CONSTRAINT_TOL:
                errors.append(f"beta{j} must sum to 1, sums to {beta.sum():.6g}")
    elif model.gamma is not None:
        basis, _ = cohort_basis(model.cohorts, model.spec.kind is ModelKind.PLAT)
        moments = basis.T @ model.gamma
        scale = np.maximum(1.0, np.abs(basis).T @ np.abs(model.gamma))
        if np.any(np.abs(moments) > CONSTRAINT_TOL * scale):
            errors.append(f"gamma violates the cohort trend constraints (moments {moments})")
    return errors


def generate_synthetic_country(
    seed: int,
    truth: Optional[SyntheticTruth] = None,
    country_code: str = "SYN",
) -> tuple[MortalitySurface, SyntheticTruth]:
    """Draw Poisson deaths from a known model.

    Args:
        seed: Seed for the death draws
        truth: Parameters and exposures (default: female Lee-Carter truth
            over 1950..2016 and ages 0..110+)
        country_code: Code stamped on the surface

    Returns:
        (surface with rates = deaths / exposures, the truth used)

    Raises:
        BadTruth: Parameters break their constraints or give rates outside (0, 1]

    Examples:
        >>> surface, truth = generate_synthetic_country(seed=7)
        >>> surface.shape
        (111, 67)
    """
    truth = truth or default_lc_truth()
    errors = validate_truth(truth)
    if errors:
        raise BadTruth(errors)

    rng = np.random.default_rng(seed)
    expected = truth.exposures * truth.rates
    deaths = rng.poisson(expected).astype(float)
    rates = deaths / truth.exposures
    model = truth.model
    logger.info(
        f"{country_code}/{model.sex.value}: synthetic {model.spec.kind.value} surface, "
        f"{int(deaths.sum())} deaths over {model.years.size} years"
    )
    surface = MortalitySurface(
        country_code=country_code,
        sex=model.sex,
        ages=model.ages,
        years=model.years,
        rates=rates,
        deaths=deaths,
        exposures=truth.exposures,
        open_upper=True,
        notes=(f"synthetic {model.spec.kind.value} truth, seed {seed}",),
    )
    return surface, truth


def synthetic_seed(seed: int, country: str, sex: Sex) -> int:
    """Death-draw seed for one synthetic (country, sex), independent of run order."""
    entropy = [int(seed), *country.encode("utf-8"), 0 if Sex.parse(sex) is Sex.FEMALE else 1]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0] >> np.uint64(1))


def synthetic_surface(seed: int, country: str, sex: Sex) -> MortalitySurface:
    """Raw synthetic surface (1950..2016, ages 0..110+) for one population.

    Each (country, sex) gets its own Lee-Carter truth and death draws.
    """
    stream = synthetic_seed(seed, country, sex)
    truth = default_lc_truth(sex=Sex.parse(sex), seed=stream)
    surface, _ = generate_synthetic_country(stream, truth=truth, country_code=country)
    return surface


def write_synthetic_dataset(repository, countries: list[str], seed: int) -> list:
    """Write HMD-layout Mx, Deaths and Exposures files for `countries`.

    Args:
        repository: HmdRepository rooted at the output directory
        countries: Report abbreviations to generate
        seed: Base seed

    Returns:
        Paths written
    """
    paths = []
    for country in countries:
        female = synthetic_surface(seed, country, Sex.FEMALE)
        male = synthetic_surface(seed, country, Sex.MALE)
        paths.extend(repository.save_surfaces(female, male))
    logger.info(f"Synthetic dataset: {len(countries)} countries, {len(paths)} files")
    return paths
