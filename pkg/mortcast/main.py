"""mortcast command-line application."""
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Optional

import typer

from mortcast.config import settings
from mortcast.exceptions import MortcastError
from mortcast.logging_config import get_logger, setup_logging
from mortcast.models.backtest import Metric
from mortcast.models.fitted import ModelKind, ModelSpec
from mortcast.models.surface import AgeRange, Sex
from mortcast.repositories.cell import CellRepository
from mortcast.repositories.fitted import FittedModelRepository
from mortcast.repositories.forecast import ForecastRepository
from mortcast.repositories.hmd import HmdRepository
from mortcast.repositories.report import ReportRepository
from mortcast.repositories.surface import SurfaceRepository
from mortcast.schemas.experiment import build_experiment_config, load_experiment_config
from mortcast.services.experiment_service import EXIT_ERROR, run_experiment
from mortcast.services.fitting import fit as fit_model
from mortcast.services.forecast_service import make_forecast
from mortcast.services.plot_service import emit_plot_script
from mortcast.services.report_service import build_report_table, render_text
from mortcast.services.synthetic_service import synthetic_surface, write_synthetic_dataset
from mortcast.utils.surface_operations import prepare_surface, truncate_ages

logger = get_logger(__name__)

app = typer.Typer(help="Stochastic mortality models and retiree-age backtests.", no_args_is_help=True)


@contextmanager
def handle_errors():
    """Map the MortcastError family to exit code 2 with one line per message."""
    try:
        yield
    except MortcastError as exc:
        for message in exc.errors:
            typer.echo(f"error [{exc.code}]: {message}", err=True)
        raise typer.Exit(code=EXIT_ERROR)


@app.callback()
def main(
    log_level: Annotated[str, typer.Option(help="DEBUG, INFO, WARNING or ERROR.")] = settings.LOG_LEVEL,
):
    """Configure logging before any command runs."""
    setup_logging(log_level)


@app.command()
def backtest(
    config: Annotated[Optional[Path], typer.Option(help="Experiment config file (key=value).")] = None,
    countries: Annotated[Optional[str], typer.Option(help="Comma-separated country codes.")] = None,
    synthetic: Annotated[bool, typer.Option(help="Use synthetic countries instead of HMD files.")] = False,
    seed: Annotated[Optional[int], typer.Option(help="Base seed.")] = None,
    jobs: Annotated[Optional[int], typer.Option(help="Worker processes.")] = None,
    output_dir: Annotated[Optional[Path], typer.Option(help="Where cells, tables and plots go.")] = None,
):
    """Run the expanding-window backtest grid and emit tables.

    Exit code 0 when every cell succeeded, 1 when some failed, 2 on
    configuration or data errors.
    """
    overrides = dict(
        countries=countries,
        synthetic=True if synthetic else None,
        seed=seed,
        jobs=jobs,
        output_dir=output_dir,
    )
    with handle_errors():
        if config is not None:
            experiment = load_experiment_config(config, **overrides)
        else:
            experiment = build_experiment_config({k: v for k, v in overrides.items() if v is not None})
        result = run_experiment(experiment)

    for table in result.tables:
        if table.horizon == 1 and not table.is_empty:
            typer.echo(render_text(table))
    if result.headline is not None:
        typer.echo(f"Headline (Partial wins >= {result.headline.min_wins}): "
                   f"{'PASS' if result.headline.passed else 'FAIL'}")
    typer.echo(f"{len(result.cells)} cells, {result.n_failed} failed -> {experiment.output_dir}")
    raise typer.Exit(code=result.exit_code)


@app.command()
def fit(
    model: Annotated[ModelKind, typer.Option(help="Model to fit.")],
    country: Annotated[str, typer.Option(help="Country code, e.g. AUS.")],
    sex: Annotated[str, typer.Option(help="F or M.")],
    data_dir: Annotated[Optional[Path], typer.Option(help="HMD directory (default MORTCAST_DATA_DIR).")] = None,
    synthetic: Annotated[bool, typer.Option(help="Fit a synthetic population.")] = False,
    lower_age: Annotated[int, typer.Option(help="Lowest age to fit (60 for the retiree range).")] = settings.FULL_LOWER_AGE,
    open_age: Annotated[int, typer.Option(help="Open age group.")] = settings.OPEN_AGE,
    start_year: Annotated[int, typer.Option()] = settings.START_YEAR,
    last_year: Annotated[Optional[int], typer.Option(help="Default: the country's configured last year.")] = None,
    horizon: Annotated[Optional[int], typer.Option(help="Also write a forecast this many years ahead.")] = None,
    alpha: Annotated[float, typer.Option()] = settings.ALPHA,
    n_sims: Annotated[int, typer.Option()] = settings.N_SIMS,
    seed: Annotated[int, typer.Option()] = settings.SEED,
    output_dir: Annotated[Path, typer.Option()] = Path(settings.OUTPUT_DIR),
):
    """Fit one model to one population; write the training surface and parameter bundle."""
    with handle_errors():
        country = country.upper()
        try:
            sex_value = Sex.parse(sex)
        except ValueError as exc:
            raise typer.BadParameter(str(exc), param_hint="--sex")
        last = last_year if last_year is not None else settings.LAST_YEARS.get(country)
        if synthetic:
            surface = prepare_surface(synthetic_surface(seed, country, sex_value), open_age, start_year, last)
        else:
            directory = data_dir or (Path(settings.DATA_DIR) if settings.DATA_DIR else None)
            if directory is None:
                raise typer.BadParameter("Give --data-dir or set MORTCAST_DATA_DIR", param_hint="--data-dir")
            surface = HmdRepository(directory).load_surface(country, sex_value, start_year, last, open_age)
        surface = truncate_ages(surface, AgeRange(lower_age, open_age, True))
        typer.echo(f"training surface -> {SurfaceRepository(output_dir).save(surface)}")

        fitted = fit_model(ModelSpec(kind=model), surface)
        bundle = FittedModelRepository(output_dir).save(fitted)
        typer.echo(f"{model.value}: converged={fitted.converged} objective={fitted.objective:.6g} -> {bundle}")

        if horizon is not None:
            forecast = make_forecast(fitted, horizon, alpha=alpha, n_sims=n_sims, seed=seed)
            name = bundle.name.replace("fit_", "forecast_", 1)
            typer.echo(f"forecast H={horizon} -> {ForecastRepository(output_dir).save(forecast, name)}")


@app.command()
def report(
    from_: Annotated[Path, typer.Option("--from", help="Cells CSV written by `mortcast backtest`.")],
    horizon: Annotated[int, typer.Option()] = 1,
    metric: Annotated[str, typer.Option(help="mape, rmspe or interval.")] = Metric.MAPE.value,
    output_dir: Annotated[Optional[Path], typer.Option(help="Also write CSV, text and plot script here.")] = None,
):
    """Print one table from a cells CSV."""
    with handle_errors():
        try:
            metric_value = Metric.parse(metric)
        except ValueError as exc:
            raise typer.BadParameter(str(exc), param_hint="--metric")
        cells = CellRepository(from_.parent).load(from_.name)
        table = build_report_table(cells, metric_value, horizon)
        text = render_text(table)
        typer.echo(text)
        if output_dir is not None:
            repository = ReportRepository(output_dir)
            repository.save_table(table)
            repository.save_text(table, text)
            emit_plot_script([table], output_dir)


@app.command()
def synth(
    out: Annotated[Path, typer.Option(help="Directory for the HMD-layout files.")],
    countries: Annotated[str, typer.Option(help="Comma-separated country codes.")] = "SYN",
    seed: Annotated[int, typer.Option()] = settings.SEED,
):
    """Write a synthetic dataset (Mx, Deaths, Exposures per country)."""
    codes = [c.strip().upper() for c in countries.split(",") if c.strip()]
    with handle_errors():
        paths = write_synthetic_dataset(HmdRepository(out), codes, seed)
    typer.echo(f"Wrote {len(paths)} files to {out}")
