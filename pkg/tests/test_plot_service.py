"""Tests for plot-script emission."""
import numpy as np
import pytest

from mortcast.exceptions import IoError
from mortcast.models.backtest import Metric, StrategyKind
from mortcast.models.fitted import ModelKind
from mortcast.models.report import ReportTable
from mortcast.models.surface import Sex
from mortcast.services.plot_service import emit_plot_script, mean_frame, render_plot_script

COLUMNS = (
    (ModelKind.LC_POISSON, StrategyKind.FULL),
    (ModelKind.LC_POISSON, StrategyKind.PARTIAL),
    (ModelKind.PLAT, StrategyKind.FULL),
    (ModelKind.PLAT, StrategyKind.PARTIAL),
)


def _table(horizon: int = 1, metric: Metric = Metric.MAPE) -> ReportTable:
    return ReportTable(
        horizon=horizon,
        metric=metric,
        columns=COLUMNS,
        rows=(("AUS", Sex.FEMALE), ("SWE", Sex.FEMALE), ("AUS", Sex.MALE)),
        values=np.array([[4.0, 3.0, 5.0, 2.0], [6.0, 5.0, 7.0, 4.0], [1.0, 2.0, 3.0, 4.0]]),
    )


class TestMeanFrame:
    """Tests for mean_frame."""

    def test_long_layout(self):
        """One row per (sex, column) holding the country mean."""
        frame = mean_frame(_table())
        assert list(frame.columns) == ["sex", "model", "strategy", "mean"]
        assert len(frame) == 8
        assert frame["mean"].tolist()[:4] == [5.0, 4.0, 6.0, 3.0]
        assert frame.iloc[4].tolist() == ["M", "lc-poisson", "full", 1.0]


class TestRenderPlotScript:
    """Tests for the script template."""

    def test_script_names_data_and_series(self):
        """The script reads its CSV and lists the models, strategies and sexes."""
        script = render_plot_script(_table(), "mape_h1_means.csv", "plot_mape_h1.py")
        assert 'DATA = HERE / "mape_h1_means.csv"' in script
        assert 'OUTPUT = HERE / "plot_mape_h1.png"' in script
        assert 'MODELS = ["lc-poisson", "plat"]' in script
        assert 'STRATEGIES = ["full", "partial"]' in script
        assert 'SEXES = ["F", "M"]' in script
        assert "MAPE, h = 1" in script

    def test_header_names_matplotlib_requirement(self):
        """The docstring says matplotlib must be installed separately."""
        script = render_plot_script(_table(), "mape_h1_means.csv", "plot_mape_h1.py")
        header = script.split('"""')[1]
        assert "Needs matplotlib, which mortcast does not install" in header
        assert "import matplotlib.pyplot as plt" in script

    def test_script_is_valid_python(self):
        """The rendered script compiles."""
        script = render_plot_script(_table(), "mape_h1_means.csv", "plot_mape_h1.py")
        compile(script, "plot_mape_h1.py", "exec")


class TestEmitPlotScript:
    """Tests for emit_plot_script."""

    def test_writes_csv_then_script(self, tmp_path):
        """Each table gives its means CSV followed by its script."""
        paths = emit_plot_script([_table()], tmp_path)
        assert [p.name for p in paths] == ["mape_h1_means.csv", "plot_mape_h1.py"]
        assert (tmp_path / "mape_h1_means.csv").read_text().splitlines()[0] == "sex,model,strategy,mean"

    def test_reruns_are_byte_identical(self, tmp_path):
        """Output depends only on the tables."""
        emit_plot_script([_table()], tmp_path / "a")
        emit_plot_script([_table()], tmp_path / "b")
        for name in ("mape_h1_means.csv", "plot_mape_h1.py"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_horizons_get_distinct_files(self, tmp_path):
        """h = 1 and h = 30 tables do not overwrite each other."""
        paths = emit_plot_script([_table(1), _table(30, Metric.MEAN_INTERVAL_SCORE)], tmp_path)
        assert len({p.name for p in paths}) == 4
        assert (tmp_path / "plot_mean_interval_score_h30.py").exists()

    def test_empty_table(self, tmp_path):
        """A table without rows cannot be plotted."""
        empty = ReportTable(horizon=1, metric=Metric.MAPE, columns=(), rows=(), values=np.empty((0, 0)))
        with pytest.raises(IoError):
            emit_plot_script([empty], tmp_path)
