"""Backtest cell repository.

Long format, one row per (cell, metric):
`country,sex,model,strategy,horizon,metric,value,n_origins,failed,failure`.
Rows are sorted so identical cells always give identical bytes.
"""
import io
from typing import Iterable

import pandas as pd

from mortcast.exceptions import MalformedRow
from mortcast.models.backtest import BacktestCell, Metric, StrategyKind
from mortcast.models.fitted import ModelKind
from mortcast.models.surface import Sex
from mortcast.repositories.base import FileRepository

COLUMNS = [
    "country", "sex", "model", "strategy", "horizon",
    "metric", "value", "n_origins", "failed", "failure",
]
KEY = ["country", "sex", "model", "strategy", "horizon"]


def cells_to_frame(cells: Iterable[BacktestCell]) -> pd.DataFrame:
    records = [
        {
            "country": cell.country,
            "sex": cell.sex.value,
            "model": cell.model.value,
            "strategy": cell.strategy.value,
            "horizon": cell.horizon,
            "metric": metric.value,
            "value": cell.value(metric),
            "n_origins": cell.n_origins,
            "failed": cell.failed,
            "failure": cell.failure or "",
        }
        for cell in cells
        for metric in Metric
    ]
    frame = pd.DataFrame.from_records(records, columns=COLUMNS)
    return frame.sort_values(KEY + ["metric"], kind="mergesort", ignore_index=True)


def serialize_cells(cells: Iterable[BacktestCell]) -> str:
    return cells_to_frame(cells).to_csv(index=False, lineterminator="\n")


def parse_cells(text: str) -> list[BacktestCell]:
    """Read cells back, in file order.

    Raises:
        MalformedRow: Missing columns or a cell without all three metrics
    """
    frame = pd.read_csv(
        io.StringIO(text),
        float_precision="round_trip",
        dtype={"country": str, "failure": str},
        keep_default_na=False,
        na_values={"value": ["", "NaN", "nan"]},
    )
    missing = set(COLUMNS[:-1]) - set(frame.columns)
    if missing:
        raise MalformedRow([f"Cells CSV lacks columns {sorted(missing)}"])

    cells = []
    for key, group in frame.groupby(KEY, sort=False):
        values = dict(zip(group["metric"], group["value"].astype(float)))
        if set(values) != {m.value for m in Metric}:
            raise MalformedRow([f"Cell {key} does not carry every metric"])
        first = group.iloc[0]
        failure = str(first["failure"]) if "failure" in group and first["failure"] else None
        country, sex, model, strategy, horizon = key
        cells.append(
            BacktestCell(
                country=str(country),
                sex=Sex.parse(sex),
                model=ModelKind(model),
                strategy=StrategyKind(strategy),
                horizon=int(horizon),
                mape=values[Metric.MAPE.value],
                rmspe=values[Metric.RMSPE.value],
                mean_interval_score=values[Metric.MEAN_INTERVAL_SCORE.value],
                n_origins=int(first["n_origins"]),
                failed=str(first["failed"]).strip().lower() == "true",
                failure=failure,
            )
        )
    return cells


class CellRepository(FileRepository):
    """Repository for the cells CSV of an experiment."""

    DEFAULT_NAME = "cells.csv"

    def save(self, cells: Iterable[BacktestCell], name: str = DEFAULT_NAME):
        return self.write_text(name, serialize_cells(cells))

    def load(self, name: str = DEFAULT_NAME) -> list[BacktestCell]:
        return parse_cells(self.read_text(name))
