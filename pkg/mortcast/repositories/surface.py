"""Surface CSV repository.

Layout: a metadata line `# country=AUS sex=F start=1950 open_upper=true`
followed by `age,year,rate[,deaths,exposures]` rows in (year, age) order.
"""
import numpy as np
import pandas as pd

from mortcast.exceptions import MalformedRow
from mortcast.models.surface import MortalitySurface, Sex
from mortcast.repositories.base import FileRepository
from mortcast.repositories.metadata import join_document, parse_bool, split_document


def serialize_surface(surface: MortalitySurface) -> str:
    """Write a surface as CSV text; parse_surface_csv reads it back exactly."""
    years, ages = np.meshgrid(surface.years, surface.ages)
    frame = pd.DataFrame(
        {
            "age": ages.T.ravel(),
            "year": years.T.ravel(),
            "rate": surface.rates.T.ravel(),
        }
    )
    if surface.has_counts:
        frame["deaths"] = surface.deaths.T.ravel()
        frame["exposures"] = surface.exposures.T.ravel()
    meta = {
        "country": surface.country_code,
        "sex": surface.sex.value,
        "start": surface.first_year,
        "open_upper": surface.open_upper,
    }
    return join_document(meta, frame)


def parse_surface_csv(text: str) -> MortalitySurface:
    """Read a surface written by `serialize_surface`.

    Raises:
        MalformedRow: Missing metadata, columns or grid cells
    """
    meta, frame = split_document(text)
    missing = {"country", "sex", "open_upper"} - set(meta)
    if missing:
        raise MalformedRow([f"Surface metadata lacks {sorted(missing)}"])
    if not {"age", "year", "rate"} <= set(frame.columns):
        raise MalformedRow([f"Surface CSV needs age,year,rate columns, got {list(frame.columns)}"])

    ages = np.sort(frame["age"].unique()).astype(np.int64)
    years = np.sort(frame["year"].unique()).astype(np.int64)
    if len(frame) != ages.size * years.size:
        raise MalformedRow([f"Surface CSV is not a full grid: {len(frame)} rows"])

    def grid(column: str) -> np.ndarray:
        table = frame.pivot(index="age", columns="year", values=column)
        return table.loc[ages, years].to_numpy(dtype=float)

    has_counts = {"deaths", "exposures"} <= set(frame.columns)
    return MortalitySurface(
        country_code=meta["country"],
        sex=Sex.parse(meta["sex"]),
        ages=ages,
        years=years,
        rates=grid("rate"),
        deaths=grid("deaths") if has_counts else None,
        exposures=grid("exposures") if has_counts else None,
        open_upper=parse_bool(meta["open_upper"]),
    )


class SurfaceRepository(FileRepository):
    """Repository for prepared surfaces, one CSV per (country, sex)."""

    @staticmethod
    def filename(country: str, sex: Sex) -> str:
        return f"surface_{country}_{Sex.parse(sex).value}.csv"

    def save(self, surface: MortalitySurface):
        return self.write_text(self.filename(surface.country_code, surface.sex), serialize_surface(surface))

    def load(self, country: str, sex: Sex) -> MortalitySurface:
        return parse_surface_csv(self.read_text(self.filename(country, sex)))
