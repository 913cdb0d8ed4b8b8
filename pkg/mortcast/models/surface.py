"""Mortality surface domain types."""
import enum
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


class Sex(str, enum.Enum):
    """Sex of a sub-population.

    Values are the single-letter codes used in file metadata; `column`
    gives the HMD column header.
    """

    FEMALE = "F"
    MALE = "M"

    @property
    def column(self) -> str:
        return "Female" if self is Sex.FEMALE else "Male"

    @classmethod
    def parse(cls, value: "str | Sex") -> "Sex":
        """Accept 'F', 'M', 'Female', 'Male' (any case)."""
        if isinstance(value, Sex):
            return value
        text = str(value).strip().lower()
        if text in ("f", "female"):
            return cls.FEMALE
        if text in ("m", "male"):
            return cls.MALE
        raise ValueError(f"Unknown sex: {value!r}")


class RateKind(str, enum.Enum):
    """HMD 1x1 table kinds."""

    RATES = "Mx_1x1"
    DEATHS = "Deaths_1x1"
    EXPOSURES = "Exposures_1x1"


@dataclass(frozen=True)
class AgeRange:
    """Inclusive age range; `open_upper` means the top label is an open group.

    Examples:
        >>> AgeRange(60, 100, True)   # retiree ages, 100+ open
        >>> AgeRange(0, 100, True)    # full age range
    """

    lower: int
    upper: int
    open_upper: bool = True

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(
                f"Age range lower ({self.lower}) must not exceed upper ({self.upper})"
            )

    @property
    def size(self) -> int:
        return self.upper - self.lower + 1

    def contains(self, other: "AgeRange") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def label(self) -> str:
        return f"{self.lower}-{self.upper}{'+' if self.open_upper else ''}"


RETIREE_RANGE = AgeRange(60, 100, True)
FULL_RANGE = AgeRange(0, 100, True)


@dataclass(frozen=True)
class RateRepair:
    """One entry of the cleaning log."""

    age: int
    year: int
    old: float
    new: float


def _frozen(array: Optional[np.ndarray], dtype=float) -> Optional[np.ndarray]:
    if array is None:
        return None
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MortalitySurface:
    """Rectangular age x year grid of central death rates.

    Arrays are copied and marked read-only on construction so surfaces can
    be shared across workers. Raw surfaces may hold NaN for missing cells;
    `clean_rates` produces the fit-ready form.

    Attributes:
        country_code: Report abbreviation (e.g. AUS, EW)
        sex: Sub-population sex
        ages: Integer age labels, ascending
        years: Consecutive calendar years, ascending
        rates: Central death rates, shape (len(ages), len(years))
        deaths: Optional death counts (real-valued), same shape
        exposures: Optional person-years of exposure, same shape
        open_upper: Whether the last age label is an open group
        repairs: Cleaning log accumulated by `clean_rates`
        notes: Free-text provenance notes (e.g. lower-fidelity aggregation)
    """

    country_code: str
    sex: Sex
    ages: np.ndarray
    years: np.ndarray
    rates: np.ndarray
    deaths: Optional[np.ndarray] = None
    exposures: Optional[np.ndarray] = None
    open_upper: bool = True
    repairs: tuple[RateRepair, ...] = field(default_factory=tuple)
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "ages", _frozen(self.ages, dtype=np.int64))
        object.__setattr__(self, "years", _frozen(self.years, dtype=np.int64))
        object.__setattr__(self, "rates", _frozen(self.rates))
        object.__setattr__(self, "deaths", _frozen(self.deaths))
        object.__setattr__(self, "exposures", _frozen(self.exposures))
        object.__setattr__(self, "sex", Sex.parse(self.sex))

        shape = (self.ages.size, self.years.size)
        for name in ("rates", "deaths", "exposures"):
            values = getattr(self, name)
            if values is not None and values.shape != shape:
                raise ValueError(
                    f"{name} has shape {values.shape}, expected {shape} (ages x years)"
                )
        if self.years.size > 1 and np.any(np.diff(self.years) != 1):
            raise ValueError("Years must be consecutive and strictly increasing")
        if self.ages.size > 1 and np.any(np.diff(self.ages) <= 0):
            raise ValueError("Ages must be strictly increasing")

    @property
    def has_counts(self) -> bool:
        return self.deaths is not None and self.exposures is not None

    @property
    def age_range(self) -> AgeRange:
        return AgeRange(int(self.ages[0]), int(self.ages[-1]), self.open_upper)

    @property
    def first_year(self) -> int:
        return int(self.years[0])

    @property
    def last_year(self) -> int:
        return int(self.years[-1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rates.shape

    def age_index(self, age: int) -> int:
        hits = np.flatnonzero(self.ages == age)
        if hits.size == 0:
            raise KeyError(age)
        return int(hits[0])

    def year_index(self, year: int) -> int:
        return int(year - self.years[0])

    def evolve(self, **changes) -> "MortalitySurface":
        """Return a copy with some fields replaced."""
        return replace(self, **changes)

    def equals(self, other: "MortalitySurface") -> bool:
        """Exact (bit-level for finite values) equality of data and metadata."""

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and np.array_equal(a, b, equal_nan=True)

        return (
            self.country_code == other.country_code
            and self.sex == other.sex
            and self.open_upper == other.open_upper
            and same(self.ages, other.ages)
            and same(self.years, other.years)
            and same(self.rates, other.rates)
            and same(self.deaths, other.deaths)
            and same(self.exposures, other.exposures)
        )
