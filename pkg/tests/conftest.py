"""Shared test configuration and fixtures.

Surfaces are synthetic so the suite never needs HMD credentials; file
fixtures live under pytest's tmp_path.
"""
import numpy as np
import pytest

from mortcast.models.surface import MortalitySurface, Sex
from mortcast.repositories.hmd import HmdRepository
from mortcast.services.synthetic_service import (
    default_lc_truth,
    generate_synthetic_country,
    synthetic_surface,
)

# =============================================================================
# SURFACE BUILDERS
# =============================================================================


def make_surface(
    rates: np.ndarray,
    ages=None,
    years=None,
    country: str = "TST",
    sex: Sex = Sex.FEMALE,
    exposures: np.ndarray = None,
    deaths: np.ndarray = None,
    open_upper: bool = True,
) -> MortalitySurface:
    """Surface over `ages` x `years` (defaults 0.. and 2000..)."""
    rates = np.asarray(rates, dtype=float)
    p, n = rates.shape
    return MortalitySurface(
        country_code=country,
        sex=sex,
        ages=np.arange(p) if ages is None else ages,
        years=np.arange(2000, 2000 + n) if years is None else years,
        rates=rates,
        deaths=deaths,
        exposures=exposures,
        open_upper=open_upper,
    )


def smooth_surface(
    ages=np.arange(0, 101),
    years=np.arange(1990, 2010),
    country: str = "TST",
    sex: Sex = Sex.FEMALE,
) -> MortalitySurface:
    """Deterministic Gompertz-like surface improving 1% a year, with counts."""
    ages = np.asarray(ages)
    years = np.asarray(years)
    rates = 1e-4 * np.exp(0.08 * ages)[:, None] * np.exp(-0.01 * (years - years[0]))[None, :]
    exposures = np.full(rates.shape, 1e5)
    return make_surface(
        rates, ages=ages, years=years, country=country, sex=sex,
        exposures=exposures, deaths=rates * exposures,
    )


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def retiree_lc_truth():
    """Lee-Carter truth on 41 ages x 40 years with exposures 1e7."""
    return default_lc_truth(
        sex=Sex.FEMALE, seed=11, ages=np.arange(60, 101), years=np.arange(1976, 2016),
        exposure_scale=1e7,
    )


@pytest.fixture
def retiree_lc_surface(retiree_lc_truth):
    """Poisson draws from `retiree_lc_truth`."""
    surface, _ = generate_synthetic_country(seed=5, truth=retiree_lc_truth)
    return surface


@pytest.fixture
def backtest_surface():
    """Full-age surface (0..100+, 1990..2009) for backtest accounting tests."""
    return smooth_surface()


@pytest.fixture
def hmd_dir(tmp_path):
    """Directory with synthetic HMD-layout files for AUS and SWE."""
    repository = HmdRepository(tmp_path / "hmd")
    for country in ("AUS", "SWE"):
        repository.save_surfaces(
            synthetic_surface(1, country, Sex.FEMALE),
            synthetic_surface(1, country, Sex.MALE),
        )
    return tmp_path / "hmd"
