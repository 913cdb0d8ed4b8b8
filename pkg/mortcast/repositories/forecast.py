"""Forecast CSV repository (`age,horizon,point,lower,upper`)."""
import numpy as np
import pandas as pd

from mortcast.exceptions import MalformedRow
from mortcast.models.fitted import ModelKind
from mortcast.models.forecast import ForecastResult
from mortcast.repositories.base import FileRepository
from mortcast.repositories.metadata import join_document, split_document

COLUMNS = ["age", "horizon", "point", "lower", "upper"]


def serialize_forecast(forecast: ForecastResult) -> str:
    horizons, ages = np.meshgrid(forecast.horizons, forecast.ages)
    frame = pd.DataFrame(
        {
            "age": ages.ravel(),
            "horizon": horizons.ravel(),
            "point": forecast.point.ravel(),
            "lower": forecast.lower.ravel(),
            "upper": forecast.upper.ravel(),
        }
    )
    meta = {
        "model": forecast.model.value,
        "alpha": repr(float(forecast.alpha)),
        "n_sims": forecast.n_sims,
        "seed": forecast.seed,
        "generator": forecast.generator,
    }
    return join_document(meta, frame)


def parse_forecast(text: str) -> ForecastResult:
    """Read a forecast written by `serialize_forecast`.

    Raises:
        MalformedRow: Missing metadata or columns, or a ragged grid
    """
    meta, frame = split_document(text)
    if list(frame.columns) != COLUMNS or not {"model", "alpha"} <= set(meta):
        raise MalformedRow([f"Forecast CSV needs {','.join(COLUMNS)} and model/alpha metadata"])
    ages = np.sort(frame["age"].unique()).astype(np.int64)
    horizons = np.sort(frame["horizon"].unique()).astype(np.int64)
    if len(frame) != ages.size * horizons.size:
        raise MalformedRow([f"Forecast CSV is not a full age x horizon grid: {len(frame)} rows"])

    def grid(column: str) -> np.ndarray:
        table = frame.pivot(index="age", columns="horizon", values=column)
        return table.loc[ages, horizons].to_numpy(dtype=float)

    return ForecastResult(
        model=ModelKind(meta["model"]),
        ages=ages,
        horizons=horizons,
        point=grid("point"),
        lower=grid("lower"),
        upper=grid("upper"),
        alpha=float(meta["alpha"]),
        n_sims=int(meta.get("n_sims", 0)),
        seed=int(meta.get("seed", 0)),
        generator=meta.get("generator", "PCG64"),
    )


class ForecastRepository(FileRepository):
    """Repository for forecast CSVs."""

    def save(self, forecast: ForecastResult, name: str):
        return self.write_text(name, serialize_forecast(forecast))

    def load(self, name: str) -> ForecastResult:
        return parse_forecast(self.read_text(name))
