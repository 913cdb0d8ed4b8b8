"""Plot-script emission.

Writes the mean rows of each report table as a small CSV plus a matplotlib
script that draws them; no image is rendered here.
"""
from pathlib import Path
from typing import Sequence

import pandas as pd
from jinja2 import Environment, PackageLoader, StrictUndefined

from mortcast.exceptions import IoError
from mortcast.logging_config import get_logger
from mortcast.models.report import ReportTable
from mortcast.repositories.base import FileRepository, PathLike
from mortcast.repositories.report import table_stem

logger = get_logger(__name__)

TEMPLATE_NAME = "plot_means.py.j2"

_environment = Environment(
    loader=PackageLoader("mortcast", "templates"),
    keep_trailing_newline=True,
    undefined=StrictUndefined,
    autoescape=False,
)


def mean_frame(table: ReportTable) -> pd.DataFrame:
    """Long frame sex,model,strategy,mean of the table's mean rows."""
    records = []
    for sex in table.sexes:
        for (model, strategy), mean in zip(table.columns, table.mean_row(sex)):
            records.append(
                {"sex": sex.value, "model": model.value, "strategy": strategy.value, "mean": mean}
            )
    return pd.DataFrame.from_records(records, columns=["sex", "model", "strategy", "mean"])


def render_plot_script(table: ReportTable, data_file: str, script_file: str) -> str:
    columns = table.columns
    return _environment.get_template(TEMPLATE_NAME).render(
        title=f"{table.metric.label}, h = {table.horizon}",
        ylabel=table.metric.label,
        data_file=data_file,
        script_file=script_file,
        image_file=Path(script_file).with_suffix(".png").name,
        models=list(dict.fromkeys(m.value for m, _ in columns)),
        strategies=list(dict.fromkeys(s.value for _, s in columns)),
        sexes=[s.value for s in table.sexes],
        bar_width=0.4,
    )


def emit_plot_script(tables: Sequence[ReportTable], output_dir: PathLike) -> list[Path]:
    """Write `<metric>_h<h>_means.csv` and `plot_<metric>_h<h>.py` per table.

    Output depends only on the tables, so re-running gives byte-identical
    files.

    Returns:
        Paths written, CSV then script for each table

    Raises:
        IoError: A table is empty or a file cannot be written

    Examples:
        >>> emit_plot_script([mape_h1], "output")
        [PosixPath('output/mape_h1_means.csv'), PosixPath('output/plot_mape_h1.py')]
    """
    repository = FileRepository(output_dir)
    written = []
    for table in tables:
        stem = table_stem(table.metric, table.horizon)
        if table.is_empty:
            raise IoError([f"Cannot plot {stem}: the table has no rows or no columns"])
        data_file = f"{stem}_means.csv"
        script_file = f"plot_{stem}.py"
        csv_text = mean_frame(table).to_csv(index=False, lineterminator="\n")
        written.append(repository.write_text(data_file, csv_text))
        written.append(repository.write_text(script_file, render_plot_script(table, data_file, script_file)))
        logger.info(f"Plot script written: {repository.path(script_file)}")
    return written
