"""Report artifacts: table CSVs, aligned text tables, verdicts and benchmarks."""
from typing import Sequence

import numpy as np
import pandas as pd

from mortcast.exceptions import MalformedRow
from mortcast.models.backtest import Metric
from mortcast.models.report import (
    BenchmarkComparison,
    ReportTable,
    StrategyVerdict,
    column_key,
    parse_column_key,
)
from mortcast.models.surface import Sex
from mortcast.repositories.base import FileRepository
from mortcast.repositories.metadata import join_document, split_document

MEAN_ROW = "Mean"


def table_stem(metric: Metric, horizon: int) -> str:
    """Shared file stem, e.g. 'mape_h1'."""
    return f"{Metric.parse(metric).value}_h{horizon}"


def serialize_table(table: ReportTable) -> str:
    """Table CSV with a Mean row closing each sex block.

    Mean rows are informational; `parse_table` drops them and the table
    recomputes them from the country rows.
    """
    keys = [column_key(c) for c in table.columns]
    records = []
    for sex in table.sexes:
        for (country, row_sex), row in zip(table.rows, table.values):
            if row_sex is sex:
                records.append([country, sex.value, *row])
        records.append([MEAN_ROW, sex.value, *table.mean_row(sex)])
    frame = pd.DataFrame.from_records(records, columns=["country", "sex", *keys])
    return join_document({"horizon": table.horizon, "metric": table.metric.value}, frame)


def parse_table(text: str) -> ReportTable:
    """Inverse of `serialize_table`.

    Raises:
        MalformedRow: Missing metadata or an unknown column
    """
    meta, frame = split_document(
        text, dtype={"country": str, "sex": str}, keep_default_na=False, na_values=[""]
    )
    if not {"horizon", "metric"} <= set(meta) or list(frame.columns[:2]) != ["country", "sex"]:
        raise MalformedRow(["Report table needs horizon/metric metadata and country,sex columns"])
    try:
        columns = tuple(parse_column_key(key) for key in frame.columns[2:])
    except ValueError as exc:
        raise MalformedRow([f"Unknown report column: {exc}"]) from exc

    body = frame[frame["country"] != MEAN_ROW]
    rows = tuple((str(c), Sex.parse(s)) for c, s in zip(body["country"], body["sex"]))
    values = body.iloc[:, 2:].to_numpy(dtype=float).reshape(len(rows), len(columns))
    return ReportTable(
        horizon=int(meta["horizon"]),
        metric=Metric.parse(meta["metric"]),
        columns=columns,
        rows=rows,
        values=values,
    )


def serialize_verdicts(verdicts: Sequence[StrategyVerdict]) -> str:
    frame = pd.DataFrame.from_records(
        [
            {
                "metric": v.metric.value,
                "horizon": v.horizon,
                "sex": v.sex.value,
                "model": v.model.value,
                "partial_mean": v.partial_mean,
                "full_mean": v.full_mean,
                "margin": v.margin,
                "winner": v.winner.value,
                "tie": v.tie,
                "n_countries": v.n_countries,
            }
            for v in verdicts
        ],
        columns=["metric", "horizon", "sex", "model", "partial_mean", "full_mean",
                 "margin", "winner", "tie", "n_countries"],
    )
    return frame.to_csv(index=False, lineterminator="\n")


def serialize_benchmark(comparisons: Sequence[BenchmarkComparison]) -> str:
    frame = pd.DataFrame.from_records(
        [
            {
                "metric": c.metric.value,
                "sex": c.sex.value,
                "model": c.model.value,
                "strategy": c.strategy.value,
                "reproduced": c.reproduced,
                "published": c.published,
                "ratio": c.ratio if np.isfinite(c.reproduced) else np.nan,
                "within_tolerance": c.within_tolerance,
            }
            for c in comparisons
        ],
        columns=["metric", "sex", "model", "strategy", "reproduced", "published",
                 "ratio", "within_tolerance"],
    )
    return frame.to_csv(index=False, lineterminator="\n")


class ReportRepository(FileRepository):
    """Repository for everything `mortcast report` and `mortcast backtest` emit.

    File names:
    - table_<metric>_h<h>.csv / .txt  tables as CSV and aligned text
    - verdicts_h<h>.csv               Partial vs Full verdicts
    - benchmark_h1.csv                comparison with the published means
    """

    def save_table(self, table: ReportTable):
        return self.write_text(
            f"table_{table_stem(table.metric, table.horizon)}.csv", serialize_table(table)
        )

    def load_table(self, metric: Metric, horizon: int) -> ReportTable:
        return parse_table(self.read_text(f"table_{table_stem(metric, horizon)}.csv"))

    def save_text(self, table: ReportTable, text: str):
        return self.write_text(f"table_{table_stem(table.metric, table.horizon)}.txt", text)

    def save_verdicts(self, verdicts: Sequence[StrategyVerdict], horizon: int):
        return self.write_text(f"verdicts_h{horizon}.csv", serialize_verdicts(verdicts))

    def save_benchmark(self, comparisons: Sequence[BenchmarkComparison]):
        return self.write_text("benchmark_h1.csv", serialize_benchmark(comparisons))
