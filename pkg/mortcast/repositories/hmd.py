"""HMD text-file repository.

Files follow the HMD naming `<code>.<kind>.txt` (e.g. `AUS.Mx_1x1.txt`),
with report abbreviations mapped to HMD codes through settings.HMD_CODES.
"""
from typing import Mapping, Optional

import numpy as np

from mortcast.config import settings
from mortcast.logging_config import get_logger
from mortcast.models.surface import MortalitySurface, RateKind, Sex
from mortcast.repositories.base import FileRepository, PathLike
from mortcast.utils.hmd_parsing import HmdTable, format_hmd_table, parse_hmd_table
from mortcast.utils.surface_operations import build_surface, prepare_surface

logger = get_logger(__name__)


class HmdRepository(FileRepository):
    """Repository for HMD 1x1 tables.

    Handles:
    - Locating the rates, deaths and exposure files of a country
    - Building prepared surfaces (year window, open age, cleaning)
    - Writing synthetic datasets in the same layout
    """

    def __init__(self, data_dir: PathLike, hmd_codes: Optional[Mapping[str, str]] = None):
        """Initialize HmdRepository.

        Args:
            data_dir: Directory with the HMD text files
            hmd_codes: Report abbreviation -> HMD file prefix (unknown
                abbreviations are used as the prefix directly)
        """
        super().__init__(data_dir)
        self.hmd_codes = dict(settings.HMD_CODES if hmd_codes is None else hmd_codes)

    def code(self, country: str) -> str:
        return self.hmd_codes.get(country, country)

    def filename(self, country: str, kind: RateKind) -> str:
        return f"{self.code(country)}.{RateKind(kind).value}.txt"

    def load_table(self, country: str, kind: RateKind, sex: Sex) -> HmdTable:
        """Parse one table.

        Raises:
            MissingData: File not found (message names the file)
        """
        return parse_hmd_table(self.read_text(self.filename(country, kind)), kind, sex)

    def load_raw_surface(self, country: str, sex: Sex, start_year: int = settings.START_YEAR) -> MortalitySurface:
        """Surface straight from the files; deaths and exposures are optional."""
        rates = self.load_table(country, RateKind.RATES, sex)
        counts = {}
        for kind in (RateKind.DEATHS, RateKind.EXPOSURES):
            if self.exists(self.filename(country, kind)):
                counts[kind] = self.load_table(country, kind, sex)
            else:
                logger.info(f"{country}: no {kind.value} file, Poisson models unavailable")
        return build_surface(
            rates,
            counts.get(RateKind.DEATHS),
            counts.get(RateKind.EXPOSURES),
            country,
            Sex.parse(sex),
            start_year,
        )

    def load_surface(
        self,
        country: str,
        sex: Sex,
        start_year: int = settings.START_YEAR,
        last_year: Optional[int] = None,
        open_age: int = settings.OPEN_AGE,
    ) -> MortalitySurface:
        """Prepared surface: years start..last, ages 0..open_age+, cleaned.

        Raises:
            MissingData: Rates file not found
            MortcastError: Any parsing or preparation failure
        """
        raw = self.load_raw_surface(country, sex, start_year)
        surface = prepare_surface(raw, open_age, start_year, last_year)
        logger.info(
            f"{country}/{Sex.parse(sex).value}: {surface.first_year}-{surface.last_year}, "
            f"ages {int(surface.ages[0])}-{int(surface.ages[-1])}+, {len(surface.repairs)} repairs"
        )
        return surface

    def save_surfaces(self, female: MortalitySurface, male: MortalitySurface) -> list:
        """Write both sexes of one country as HMD Mx, Deaths and Exposures files."""
        if not (np.array_equal(female.ages, male.ages) and np.array_equal(female.years, male.years)):
            raise ValueError("Female and male surfaces must share the same grid")
        country = female.country_code
        tables = [(RateKind.RATES, female.rates, male.rates)]
        if female.has_counts and male.has_counts:
            tables.append((RateKind.DEATHS, female.deaths, male.deaths))
            tables.append((RateKind.EXPOSURES, female.exposures, male.exposures))
        paths = []
        for kind, f_values, m_values in tables:
            text = format_hmd_table(
                self.code(country), kind, female.ages, female.years, f_values, m_values,
                female.open_upper,
            )
            paths.append(self.write_text(self.filename(country, kind), text))
        return paths
