"""Tests for the mortcast command line."""
import pytest
from typer.testing import CliRunner

from mortcast.main import app
from mortcast.models.backtest import BacktestCell, StrategyKind
from mortcast.models.fitted import ModelKind
from mortcast.models.surface import Sex
from mortcast.repositories.cell import CellRepository


@pytest.fixture
def runner():
    return CliRunner()


def _cells() -> list[BacktestCell]:
    cells = []
    for country, mape in (("AUS", 4.0), ("SWE", 6.0)):
        for strategy, shift in ((StrategyKind.FULL, 1.0), (StrategyKind.PARTIAL, 0.0)):
            cells.append(
                BacktestCell(
                    country=country, sex=Sex.FEMALE, model=ModelKind.APC, strategy=strategy,
                    horizon=1, mape=mape + shift, rmspe=mape + shift, mean_interval_score=0.01,
                    n_origins=30,
                )
            )
    return cells


class TestSynthCommand:
    """Tests for `mortcast synth`."""

    def test_writes_hmd_files(self, runner, tmp_path):
        """One country gives Mx, Deaths and Exposures files."""
        result = runner.invoke(app, ["synth", "--out", str(tmp_path), "--countries", "syn", "--seed", "1"])
        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            "SYN.Deaths_1x1.txt", "SYN.Exposures_1x1.txt", "SYN.Mx_1x1.txt",
        ]
        assert "Wrote 3 files" in result.output


class TestFitCommand:
    """Tests for `mortcast fit`."""

    def test_synthetic_fit_and_forecast(self, runner, tmp_path):
        """Training surface, parameter bundle and forecast are written."""
        result = runner.invoke(app, [
            "fit", "--model", "lc-gaussian", "--country", "SYN", "--sex", "F", "--synthetic",
            "--lower-age", "60", "--start-year", "1980", "--horizon", "5", "--n-sims", "100",
            "--output-dir", str(tmp_path),
        ])
        assert result.exit_code == 0, result.output
        names = {p.name for p in tmp_path.iterdir()}
        assert {
            "surface_SYN_F.csv", "fit_SYN_F_lc-gaussian.csv", "forecast_SYN_F_lc-gaussian.csv",
        } <= names
        assert "converged=True" in result.output

    def test_fit_from_hmd_dir(self, runner, hmd_dir, tmp_path):
        """HMD files are read from --data-dir."""
        result = runner.invoke(app, [
            "fit", "--model", "lc-gaussian", "--country", "AUS", "--sex", "M",
            "--data-dir", str(hmd_dir), "--lower-age", "60", "--start-year", "1990",
            "--output-dir", str(tmp_path),
        ])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "fit_AUS_M_lc-gaussian.csv").exists()

    def test_missing_country_file(self, runner, tmp_path):
        """A missing HMD file exits with code 2 and names the file."""
        result = runner.invoke(app, [
            "fit", "--model", "apc", "--country", "JPN", "--sex", "F",
            "--data-dir", str(tmp_path), "--output-dir", str(tmp_path / "out"),
        ])
        assert result.exit_code == 2
        assert "JPN.Mx_1x1.txt" in result.output

    def test_bad_sex(self, runner, tmp_path):
        """An unknown sex is a usage error."""
        result = runner.invoke(app, [
            "fit", "--model", "apc", "--country", "AUS", "--sex", "X", "--synthetic",
            "--output-dir", str(tmp_path),
        ])
        assert result.exit_code == 2


class TestReportCommand:
    """Tests for `mortcast report`."""

    def test_prints_table(self, runner, tmp_path):
        """The h = 1 MAPE table is printed with its mean row."""
        path = CellRepository(tmp_path).save(_cells())
        result = runner.invoke(app, ["report", "--from", str(path)])
        assert result.exit_code == 0, result.output
        assert "MAPE, h = 1 (* = most accurate)" in result.output
        assert "Mean" in result.output

    def test_writes_outputs(self, runner, tmp_path):
        """--output-dir adds the table CSV, text and plot script."""
        path = CellRepository(tmp_path).save(_cells())
        out = tmp_path / "report"
        result = runner.invoke(app, [
            "report", "--from", str(path), "--metric", "interval", "--output-dir", str(out),
        ])
        assert result.exit_code == 0, result.output
        names = {p.name for p in out.iterdir()}
        assert {
            "table_mean_interval_score_h1.csv",
            "table_mean_interval_score_h1.txt",
            "plot_mean_interval_score_h1.py",
        } <= names

    def test_missing_cells_file(self, runner, tmp_path):
        """A missing cells CSV exits with code 2."""
        result = runner.invoke(app, ["report", "--from", str(tmp_path / "cells.csv")])
        assert result.exit_code == 2


class TestBacktestCommand:
    """Tests for `mortcast backtest`."""

    def test_unknown_config_key(self, runner, tmp_path):
        """Config errors exit with code 2 and name the key."""
        config = tmp_path / "experiment.txt"
        config.write_text("holdot = 5\n", encoding="utf-8")
        result = runner.invoke(app, ["backtest", "--config", str(config)])
        assert result.exit_code == 2
        assert "Unknown key: holdot" in result.output

    def test_synthetic_backtest(self, runner, tmp_path):
        """A small synthetic grid runs clean and writes its cells."""
        config = tmp_path / "experiment.txt"
        config.write_text(
            "synthetic = true\n"
            "countries = SYN\n"
            "sexes = F\n"
            "models = lc-gaussian\n"
            "holdout = 5\n"
            "n_sims = 100\n"
            "start_year = 1990\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        result = runner.invoke(app, [
            "backtest", "--config", str(config), "--output-dir", str(out), "--seed", "2",
        ])
        assert result.exit_code == 0, result.output
        assert (out / "cells.csv").exists()
        assert "10 cells, 0 failed" in result.output
