"""Experiment orchestration over the country x sex x model x strategy grid.

Surfaces are loaded up front (a missing file stops the run before any
fitting). Each (population, model, strategy) backtest is an independent
task; with more than one job they run in a process pool and the event loop
collects them, so output files are written from a single place.
"""
import asyncio
import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from mortcast.exceptions import ConfigInvalid, IncompleteGrid
from mortcast.logging_config import get_logger, init_worker_logging
from mortcast.models.backtest import BacktestCell, Metric, Strategy
from mortcast.models.fitted import ModelSpec
from mortcast.models.report import BenchmarkComparison, HeadlineResult, ReportTable, StrategyVerdict
from mortcast.models.surface import MortalitySurface
from mortcast.repositories.cell import CellRepository
from mortcast.repositories.hmd import HmdRepository
from mortcast.repositories.report import ReportRepository
from mortcast.schemas.experiment import ExperimentConfig
from mortcast.services.backtest_service import BacktestService
from mortcast.services.plot_service import emit_plot_script
from mortcast.services.report_service import (
    build_report_table,
    compare_with_benchmark,
    headline_check,
    render_text,
    render_verdicts,
    summarize_strategy_winner,
)
from mortcast.services.synthetic_service import synthetic_surface
from mortcast.utils.surface_operations import prepare_surface
from mortcast.validators.config_validators import validate_experiment_config

logger = get_logger(__name__)

EXIT_CLEAN = 0
EXIT_FAILED_CELLS = 1
EXIT_ERROR = 2


@dataclass(frozen=True)
class BacktestTask:
    """One (population, model, strategy) backtest; picklable for worker processes."""

    surface: MortalitySurface
    spec: ModelSpec
    strategy: Strategy
    holdout: int
    alpha: float
    n_sims: int
    seed: int
    rmspe_outside_root: bool

    @property
    def label(self) -> str:
        return (
            f"{self.surface.country_code}/{self.surface.sex.value} "
            f"{self.spec.kind.value} {self.strategy.kind.value}"
        )


def run_backtest_task(task: BacktestTask) -> list[BacktestCell]:
    """Worker entry point."""
    return BacktestService().run(
        task.surface,
        task.spec,
        task.strategy,
        holdout=task.holdout,
        alpha=task.alpha,
        n_sims=task.n_sims,
        seed=task.seed,
        rmspe_outside_root=task.rmspe_outside_root,
    )


@dataclass
class ExperimentResult:
    """Everything an experiment produced."""

    cells: list[BacktestCell]
    tables: list[ReportTable] = field(default_factory=list)
    verdicts: list[StrategyVerdict] = field(default_factory=list)
    headline: Optional[HeadlineResult] = None
    benchmark: list[BenchmarkComparison] = field(default_factory=list)

    @property
    def n_failed(self) -> int:
        return sum(cell.failed for cell in self.cells)

    @property
    def exit_code(self) -> int:
        return EXIT_FAILED_CELLS if self.n_failed else EXIT_CLEAN


class ExperimentService:
    """Service running a configured experiment end to end.

    Handles:
    - Configuration checks and surface loading (HMD files or synthetic)
    - Fan-out of backtests to a worker pool
    - Tables for h = 1 and h = holdout, verdicts, headline, benchmark, plots
    """

    def __init__(self, config: ExperimentConfig, executor: Optional[Executor] = None):
        """Initialize experiment service.

        Args:
            config: Validated experiment configuration
            executor: Pool for backtests; by default a ProcessPoolExecutor
                with `config.jobs` workers (none when jobs == 1)
        """
        self.config = config
        self.executor = executor
        self.cell_repo = CellRepository(config.output_dir)
        self.report_repo = ReportRepository(config.output_dir)

    def load_surfaces(self) -> list[MortalitySurface]:
        """Prepared surfaces for every (country, sex), in config order.

        Raises:
            MissingData: An HMD file is missing (message names it)
        """
        config = self.config
        repository = None if config.synthetic else HmdRepository(config.data_dir)
        surfaces = []
        for country in config.countries:
            for sex in config.sexes:
                if repository is None:
                    raw = synthetic_surface(config.seed, country, sex)
                    surface = prepare_surface(
                        raw, config.open_age, config.start_year, config.last_year(country)
                    )
                else:
                    surface = repository.load_surface(
                        country, sex, config.start_year, config.last_year(country), config.open_age
                    )
                surfaces.append(surface)
        return surfaces

    def tasks(self, surfaces: list[MortalitySurface]) -> list[BacktestTask]:
        config = self.config
        return [
            BacktestTask(
                surface=surface,
                spec=spec,
                strategy=config.strategy(kind),
                holdout=config.holdout,
                alpha=config.alpha,
                n_sims=config.n_sims,
                seed=config.seed,
                rmspe_outside_root=config.rmspe_outside_root,
            )
            for surface in surfaces
            for spec in config.model_specs()
            for kind in config.strategies
        ]

    async def run_backtests(self, tasks: list[BacktestTask]) -> list[BacktestCell]:
        """Run every task; results keep task order whatever the completion order."""
        if self.executor is None and self.config.jobs == 1:
            cells = []
            for task in tasks:
                cells.extend(run_backtest_task(task))
            return cells

        loop = asyncio.get_running_loop()
        executor = self.executor or ProcessPoolExecutor(
            max_workers=self.config.jobs,
            initializer=init_worker_logging,
            initargs=(logging.getLogger().level,),
        )
        try:
            futures = [loop.run_in_executor(executor, run_backtest_task, task) for task in tasks]
            results = await asyncio.gather(*futures)
        finally:
            if self.executor is None:
                executor.shutdown()
        return [cell for chunk in results for cell in chunk]

    def report(self, cells: list[BacktestCell]) -> ExperimentResult:
        """Tables, verdicts and comparisons for h = 1 and h = holdout."""
        config = self.config
        horizons = sorted({1, config.holdout})
        result = ExperimentResult(cells=cells)
        for horizon in horizons:
            verdicts_h = []
            for metric in Metric:
                table = build_report_table(cells, metric, horizon, config.countries)
                result.tables.append(table)
                try:
                    verdicts_h.extend(summarize_strategy_winner(cells, metric, horizon))
                except IncompleteGrid as exc:
                    for message in exc.errors:
                        logger.warning(f"No verdict: {message}")
            result.verdicts.extend(verdicts_h)
        h1_verdicts = [v for v in result.verdicts if v.horizon == 1]
        if h1_verdicts:
            result.headline = headline_check(h1_verdicts)
        result.benchmark = compare_with_benchmark(result.tables)
        return result

    def write_outputs(self, result: ExperimentResult) -> None:
        self.cell_repo.save(result.cells)
        for table in result.tables:
            self.report_repo.save_table(table)
            self.report_repo.save_text(table, render_text(table))
        for horizon in sorted({t.horizon for t in result.tables}):
            self.report_repo.save_verdicts(
                [v for v in result.verdicts if v.horizon == horizon], horizon
            )
        if result.benchmark:
            self.report_repo.save_benchmark(result.benchmark)
        emit_plot_script([t for t in result.tables if not t.is_empty], self.config.output_dir)

    async def run(self) -> ExperimentResult:
        """Validate, load, backtest, report and write.

        Raises:
            ConfigInvalid: Cross-field configuration errors
            MissingData: Input files missing
        """
        checked = validate_experiment_config(self.config).raise_for(ConfigInvalid)
        for warning in checked.warnings:
            logger.warning(warning)

        surfaces = self.load_surfaces()
        tasks = self.tasks(surfaces)
        logger.info(
            f"Experiment: {len(surfaces)} populations, {len(tasks)} backtests, "
            f"holdout {self.config.holdout}, {self.config.jobs} job(s)"
        )
        cells = await self.run_backtests(tasks)
        result = self.report(cells)
        self.write_outputs(result)

        logger.info(
            f"Experiment done: {len(cells)} cells, {result.n_failed} failed, "
            f"output in {self.config.output_dir}"
        )
        if result.verdicts:
            logger.info("Verdicts:\n" + render_verdicts(result.verdicts).rstrip())
        return result


def run_experiment(config: ExperimentConfig, executor: Optional[Executor] = None) -> ExperimentResult:
    """Synchronous entry point around `ExperimentService.run`.

    Examples:
        >>> result = run_experiment(config)
        >>> result.exit_code
        0
    """
    return asyncio.run(ExperimentService(config, executor).run())
