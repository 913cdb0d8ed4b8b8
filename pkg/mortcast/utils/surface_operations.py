"""Pure operations on mortality surfaces.

Every function takes a surface and returns a new one; inputs are never
modified.
"""
from typing import Optional

import numpy as np

from mortcast.exceptions import (
    GridMismatch,
    NoYearsAfterStart,
    RangeOutOfBounds,
    TopOutOfRange,
    UnrepairableColumn,
)
from mortcast.logging_config import get_logger
from mortcast.models.surface import AgeRange, MortalitySurface, RateRepair, Sex
from mortcast.utils.hmd_parsing import HmdTable, table_grid, table_to_matrix

logger = get_logger(__name__)


def _check_rectangular(table: HmdTable, ages: np.ndarray, years: np.ndarray, name: str) -> None:
    expected = len(ages) * len(years)
    if len(table) != expected:
        raise GridMismatch(
            [f"{name} table is not rectangular: {len(table)} cells for "
             f"{len(ages)} ages x {len(years)} years"]
        )
    if len(years) > 1 and np.any(np.diff(years) != 1):
        raise GridMismatch([f"{name} table years are not consecutive"])


def build_surface(
    rates: HmdTable,
    deaths: Optional[HmdTable],
    exposures: Optional[HmdTable],
    country: str,
    sex: Sex,
    start_year: int,
) -> MortalitySurface:
    """Assemble parsed HMD tables into a surface from `start_year` onwards.

    Where both counts are present the rate is recomputed as
    deaths / exposures (published Mx values are rounded); missing counts
    become 0 and missing rates stay NaN for `clean_rates` to repair.

    Raises:
        GridMismatch: Count tables cover a different (age, year) grid
        NoYearsAfterStart: No data at or after `start_year`

    Examples:
        >>> surface = build_surface(mx, dx, ex, "AUS", Sex.FEMALE, 1950)
        >>> surface.first_year
        1950
    """
    ages, years = table_grid(rates)
    _check_rectangular(rates, ages, years, "Rates")
    for name, table in (("Deaths", deaths), ("Exposures", exposures)):
        if table is not None and set(table) != set(rates):
            missing = sorted(set(rates) - set(table))[:3]
            extra = sorted(set(table) - set(rates))[:3]
            raise GridMismatch(
                [f"{name} grid differs from rates grid "
                 f"(missing e.g. {missing}, extra e.g. {extra})"]
            )

    keep = years >= start_year
    if not np.any(keep):
        raise NoYearsAfterStart(
            [f"No data at or after {start_year} (last year is {int(years[-1])})"]
        )
    years = years[keep]

    rate_matrix = table_to_matrix(rates, ages, years)
    death_matrix = exposure_matrix = None
    if deaths is not None:
        death_matrix = np.nan_to_num(table_to_matrix(deaths, ages, years), nan=0.0)
    if exposures is not None:
        exposure_matrix = np.nan_to_num(table_to_matrix(exposures, ages, years), nan=0.0)

    if death_matrix is not None and exposure_matrix is not None:
        positive = exposure_matrix > 0
        rate_matrix = np.where(
            positive, death_matrix / np.where(positive, exposure_matrix, 1.0), rate_matrix
        )

    n_missing = int(np.isnan(rate_matrix).sum())
    if n_missing:
        logger.info(f"{country}/{Sex.parse(sex).value}: {n_missing} missing rates left for cleaning")

    return MortalitySurface(
        country_code=country,
        sex=sex,
        ages=ages,
        years=years,
        rates=rate_matrix,
        deaths=death_matrix,
        exposures=exposure_matrix,
        open_upper=True,
    )


def aggregate_open_age(surface: MortalitySurface, top: int) -> MortalitySurface:
    """Collapse all ages >= `top` into one open age group.

    With counts the open-age rate is sum(deaths) / sum(exposures); without
    counts it falls back to the unweighted mean of the rates (lower
    fidelity, recorded in `notes`).

    Raises:
        TopOutOfRange: `top` is not one of the surface's age labels

    Examples:
        >>> aggregate_open_age(surface_0_110, 100).ages[-1]
        100
    """
    if top not in surface.ages:
        raise TopOutOfRange(
            [f"Open age {top} outside surface ages "
             f"{int(surface.ages[0])}..{int(surface.ages[-1])}"]
        )
    idx = surface.age_index(top)
    if idx == surface.ages.size - 1 and surface.open_upper:
        return surface

    block = slice(idx, None)
    notes = surface.notes
    deaths = exposures = None
    if surface.has_counts:
        d_top = surface.deaths[block].sum(axis=0)
        e_top = surface.exposures[block].sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            r_top = np.where(e_top > 0, d_top / np.where(e_top > 0, e_top, 1.0), np.nan)
        deaths = np.vstack([surface.deaths[:idx], d_top])
        exposures = np.vstack([surface.exposures[:idx], e_top])
    else:
        with np.errstate(all="ignore"):
            r_top = np.nanmean(surface.rates[block], axis=0)
        note = f"open age {top}+ aggregated from rates without counts (unweighted mean)"
        logger.warning(f"{surface.country_code}/{surface.sex.value}: {note}")
        notes = notes + (note,)

    n_zero = int(np.sum(r_top == 0))
    if n_zero:
        logger.info(
            f"{surface.country_code}/{surface.sex.value}: open age {top}+ has "
            f"{n_zero} zero rates, flagged for cleaning"
        )

    return surface.evolve(
        ages=surface.ages[: idx + 1],
        rates=np.vstack([surface.rates[:idx], r_top]),
        deaths=deaths,
        exposures=exposures,
        open_upper=True,
        notes=notes,
    )


def truncate_ages(surface: MortalitySurface, age_range: AgeRange) -> MortalitySurface:
    """Restrict a surface to `age_range`; years and metadata are kept.

    An open upper bound must coincide with the surface's own open top age
    (aggregate first otherwise).

    Raises:
        RangeOutOfBounds: Range not contained in the surface's ages
    """
    lo, hi = int(surface.ages[0]), int(surface.ages[-1])
    if age_range.lower < lo or age_range.upper > hi:
        raise RangeOutOfBounds(
            [f"Age range {age_range.label()} not within surface ages {lo}..{hi}"]
        )
    if age_range.open_upper and (age_range.upper != hi or not surface.open_upper):
        raise RangeOutOfBounds(
            [f"Open top age {age_range.upper}+ requires the surface to end at an open "
             f"{age_range.upper}+ group (surface ends at {hi}"
             f"{'+' if surface.open_upper else ''})"]
        )
    keep = (surface.ages >= age_range.lower) & (surface.ages <= age_range.upper)
    if keep.all():
        return surface

    def cut(values):
        return None if values is None else values[keep]

    return surface.evolve(
        ages=surface.ages[keep],
        rates=surface.rates[keep],
        deaths=cut(surface.deaths),
        exposures=cut(surface.exposures),
        open_upper=surface.open_upper and age_range.upper == hi,
        repairs=tuple(r for r in surface.repairs if age_range.lower <= r.age <= age_range.upper),
    )


def truncate_years(surface: MortalitySurface, first: int, last: int) -> MortalitySurface:
    """Restrict a surface to calendar years first..last inclusive.

    Raises:
        RangeOutOfBounds: Requested years not within the surface
    """
    if first > last or first < surface.first_year or last > surface.last_year:
        raise RangeOutOfBounds(
            [f"Years {first}..{last} not within surface years "
             f"{surface.first_year}..{surface.last_year}"]
        )
    if first == surface.first_year and last == surface.last_year:
        return surface
    cols = slice(first - surface.first_year, last - surface.first_year + 1)

    def cut(values):
        return None if values is None else values[:, cols]

    return surface.evolve(
        years=surface.years[cols],
        rates=surface.rates[:, cols],
        deaths=cut(surface.deaths),
        exposures=cut(surface.exposures),
        repairs=tuple(r for r in surface.repairs if first <= r.year <= last),
    )


def _repair_column(column: np.ndarray) -> np.ndarray:
    """Geometric interpolation over ages for non-positive / missing cells."""
    valid = np.isfinite(column) & (column > 0)
    positions = np.flatnonzero(valid)
    if positions.size == len(column):
        return column
    log_valid = np.log(column[valid])
    # np.interp holds the end values constant beyond the first/last valid age
    filled = np.exp(np.interp(np.arange(len(column)), positions, log_valid))
    return np.where(valid, column, filled)


def clean_rates(surface: MortalitySurface) -> MortalitySurface:
    """Make every rate strictly positive and at most 1.

    Rates above 1 are clamped to 1; zero, negative or missing rates are
    replaced by geometric interpolation between the nearest valid ages of
    the same year, boundary ages copying their nearest valid neighbour.
    Each change is appended to `surface.repairs`. Counts are left as is.

    Raises:
        UnrepairableColumn: A year has no positive rate at all

    Examples:
        >>> cleaned = clean_rates(surface)
        >>> bool((cleaned.rates > 0).all() and (cleaned.rates <= 1).all())
        True
    """
    rates = np.array(surface.rates, dtype=float)
    clamped = np.isfinite(rates) & (rates > 1.0)
    rates[clamped] = 1.0

    for j in range(rates.shape[1]):
        column = rates[:, j]
        if not np.any(np.isfinite(column) & (column > 0)):
            raise UnrepairableColumn(
                [f"{surface.country_code}/{surface.sex.value}: year "
                 f"{int(surface.years[j])} has no positive rates"]
            )
        rates[:, j] = _repair_column(column)

    changed = ~((rates == surface.rates) | (np.isnan(rates) & np.isnan(surface.rates)))
    if not changed.any():
        return surface

    rows, cols = np.nonzero(changed)
    repairs = tuple(
        RateRepair(
            age=int(surface.ages[i]),
            year=int(surface.years[j]),
            old=float(surface.rates[i, j]),
            new=float(rates[i, j]),
        )
        for i, j in zip(rows, cols)
    )
    logger.info(
        f"{surface.country_code}/{surface.sex.value}: repaired {len(repairs)} rates "
        f"({int(clamped.sum())} clamped to 1)"
    )
    return surface.evolve(rates=rates, repairs=surface.repairs + repairs)


def prepare_surface(
    surface: MortalitySurface,
    open_age: int,
    first_year: Optional[int] = None,
    last_year: Optional[int] = None,
) -> MortalitySurface:
    """Year window, open-age aggregation and cleaning in the order used for fitting."""
    first = surface.first_year if first_year is None else max(first_year, surface.first_year)
    last = surface.last_year if last_year is None else min(last_year, surface.last_year)
    surface = truncate_years(surface, first, last)
    surface = aggregate_open_age(surface, open_age)
    return clean_rates(surface)
