"""Report tables, strategy verdicts and the published-benchmark comparison."""
from collections import defaultdict
from typing import Iterable, Optional, Sequence

import numpy as np

from mortcast.exceptions import IncompleteGrid
from mortcast.logging_config import get_logger
from mortcast.models.backtest import BacktestCell, Metric, StrategyKind
from mortcast.models.fitted import ModelKind
from mortcast.models.report import (
    BenchmarkComparison,
    Column,
    HeadlineResult,
    ReportTable,
    StrategyVerdict,
)
from mortcast.models.surface import Sex

logger = get_logger(__name__)

BENCHMARK_TOLERANCE = 0.2
HEADLINE_METRICS = (Metric.MAPE, Metric.MEAN_INTERVAL_SCORE)

# Published 19-country mean rows at h = 1, interval scores on the x100 scale.
# (metric, sex, model) -> (Full, Partial)
_PUBLISHED_H1 = {
    (Metric.MAPE, Sex.FEMALE): {
        ModelKind.LC_POISSON: (5.24, 5.12),
        ModelKind.LC_GAUSSIAN: (8.49, 5.39),
        ModelKind.LC_GAUSSIAN2: (5.85, 4.85),
        ModelKind.APC: (7.59, 6.66),
        ModelKind.PLAT: (5.05, 4.78),
    },
    (Metric.MAPE, Sex.MALE): {
        ModelKind.LC_POISSON: (6.60, 5.44),
        ModelKind.LC_GAUSSIAN: (9.90, 7.01),
        ModelKind.LC_GAUSSIAN2: (7.14, 6.14),
        ModelKind.APC: (7.14, 6.11),
        ModelKind.PLAT: (5.26, 4.97),
    },
    (Metric.RMSPE, Sex.FEMALE): {
        ModelKind.LC_POISSON: (6.80, 6.71),
        ModelKind.LC_GAUSSIAN: (10.34, 6.94),
        ModelKind.LC_GAUSSIAN2: (7.51, 6.34),
        ModelKind.APC: (9.33, 8.31),
        ModelKind.PLAT: (6.48, 6.33),
    },
    (Metric.RMSPE, Sex.MALE): {
        ModelKind.LC_POISSON: (8.79, 7.62),
        ModelKind.LC_GAUSSIAN: (12.36, 9.32),
        ModelKind.LC_GAUSSIAN2: (9.47, 8.37),
        ModelKind.APC: (9.45, 8.31),
        ModelKind.PLAT: (7.28, 7.13),
    },
    (Metric.MEAN_INTERVAL_SCORE, Sex.FEMALE): {
        ModelKind.LC_POISSON: (3.81, 3.48),
        ModelKind.LC_GAUSSIAN: (3.86, 3.18),
        ModelKind.LC_GAUSSIAN2: (3.31, 3.29),
        ModelKind.APC: (6.46, 5.55),
        ModelKind.PLAT: (3.00, 2.68),
    },
    (Metric.MEAN_INTERVAL_SCORE, Sex.MALE): {
        ModelKind.LC_POISSON: (7.02, 6.15),
        ModelKind.LC_GAUSSIAN: (6.22, 5.71),
        ModelKind.LC_GAUSSIAN2: (5.77, 5.73),
        ModelKind.APC: (10.33, 8.71),
        ModelKind.PLAT: (5.20, 4.72),
    },
}

BENCHMARK_H1_MEANS: dict[tuple[Metric, Sex, ModelKind, StrategyKind], float] = {
    (metric, sex, model, strategy): pair[index]
    for (metric, sex), models in _PUBLISHED_H1.items()
    for model, pair in models.items()
    for index, strategy in enumerate((StrategyKind.FULL, StrategyKind.PARTIAL))
}


def _ordered(values: Iterable, order: Sequence) -> list:
    present = set(values)
    known = [v for v in order if v in present]
    return known + sorted(present - set(known), key=str)


def build_report_table(
    cells: Sequence[BacktestCell],
    metric: Metric,
    horizon: int,
    countries: Optional[Sequence[str]] = None,
) -> ReportTable:
    """Lay the cells of one horizon out as a country x (model, strategy) table.

    Rows are ordered by sex (F then M) and then by `countries` (first
    appearance when not given). Missing combinations and failed cells
    show as NaN.

    Examples:
        >>> table = build_report_table(cells, Metric.MAPE, horizon=1)
        >>> table.columns[0]
        (<ModelKind.LC_POISSON: 'lc-poisson'>, <StrategyKind.FULL: 'full'>)
    """
    metric = Metric.parse(metric)
    selected = [c for c in cells if c.horizon == horizon]
    country_order = list(countries) if countries else list(dict.fromkeys(c.country for c in selected))
    models = _ordered((c.model for c in selected), list(ModelKind))
    strategies = _ordered((c.strategy for c in selected), [StrategyKind.FULL, StrategyKind.PARTIAL])
    sexes = _ordered((c.sex for c in selected), [Sex.FEMALE, Sex.MALE])

    columns: tuple[Column, ...] = tuple((m, s) for m in models for s in strategies)
    rows = tuple(
        (country, sex)
        for sex in sexes
        for country in country_order
        if any(c.country == country and c.sex is sex for c in selected)
    )
    values = np.full((len(rows), len(columns)), np.nan)
    row_pos = {row: i for i, row in enumerate(rows)}
    col_pos = {col: j for j, col in enumerate(columns)}
    for cell in selected:
        key = (cell.country, cell.sex)
        if key not in row_pos:
            continue
        values[row_pos[key], col_pos[(cell.model, cell.strategy)]] = (
            cell.value(metric) * metric.report_scale
        )
    return ReportTable(horizon=horizon, metric=metric, columns=columns, rows=rows, values=values)


def summarize_strategy_winner(
    cells: Sequence[BacktestCell],
    metric: Metric,
    horizon: int,
) -> list[StrategyVerdict]:
    """Compare the country-mean error of Partial against Full per (sex, model).

    Raises:
        IncompleteGrid: A (sex, model) lacks one strategy, the strategies
            cover different countries, or a contributing cell failed
    """
    metric = Metric.parse(metric)
    grouped: dict = defaultdict(dict)
    for cell in cells:
        if cell.horizon == horizon:
            grouped[(cell.sex, cell.model)].setdefault(cell.strategy, {})[cell.country] = cell

    errors = []
    verdicts = []
    for sex in _ordered((k[0] for k in grouped), [Sex.FEMALE, Sex.MALE]):
        for model in _ordered((k[1] for k in grouped if k[0] is sex), list(ModelKind)):
            by_strategy = grouped[(sex, model)]
            label = f"{sex.value}/{model.value} h={horizon}"
            partial = by_strategy.get(StrategyKind.PARTIAL, {})
            full = by_strategy.get(StrategyKind.FULL, {})
            if not partial or not full:
                errors.append(f"{label}: both strategies are needed")
                continue
            if set(partial) != set(full):
                errors.append(f"{label}: strategies cover different countries")
                continue
            failed = sorted(c for c in partial if partial[c].failed or full[c].failed)
            if failed:
                errors.append(f"{label}: failed cells for {', '.join(failed)}")
                continue

            scale = metric.report_scale
            partial_mean = float(np.mean([partial[c].value(metric) for c in partial])) * scale
            full_mean = float(np.mean([full[c].value(metric) for c in full])) * scale
            tie = partial_mean == full_mean
            verdicts.append(
                StrategyVerdict(
                    sex=sex,
                    model=model,
                    metric=metric,
                    horizon=horizon,
                    partial_mean=partial_mean,
                    full_mean=full_mean,
                    winner=StrategyKind.PARTIAL if partial_mean < full_mean else StrategyKind.FULL,
                    tie=tie,
                    n_countries=len(partial),
                )
            )
    if errors:
        raise IncompleteGrid(errors)
    return verdicts


def headline_check(verdicts: Sequence[StrategyVerdict], min_wins: int = 4) -> HeadlineResult:
    """Partial must win for at least `min_wins` models in every (metric, sex) group.

    Only MAPE and interval-score verdicts count; ties are not wins.
    """
    wins: dict = {}
    for verdict in verdicts:
        if verdict.metric not in HEADLINE_METRICS:
            continue
        key = (verdict.metric, verdict.sex)
        wins.setdefault(key, 0)
        if verdict.winner is StrategyKind.PARTIAL and not verdict.tie:
            wins[key] += 1
    passed = bool(wins) and all(count >= min_wins for count in wins.values())
    logger.info(
        "Headline check "
        + ("passed" if passed else "failed")
        + ": "
        + ", ".join(f"{m.value}/{s.value} {n} wins" for (m, s), n in wins.items())
    )
    return HeadlineResult(passed=passed, wins=wins, min_wins=min_wins)


def compare_with_benchmark(
    tables: Sequence[ReportTable],
    tolerance: float = BENCHMARK_TOLERANCE,
) -> list[BenchmarkComparison]:
    """Compare the h = 1 mean rows with the published means.

    Only (metric, sex, model, strategy) combinations present both in the
    tables and in the published set are reported.
    """
    comparisons = []
    for table in tables:
        if table.horizon != 1:
            continue
        for sex in table.sexes:
            means = table.mean_row(sex)
            for j, (model, strategy) in enumerate(table.columns):
                published = BENCHMARK_H1_MEANS.get((table.metric, sex, model, strategy))
                if published is None:
                    continue
                comparisons.append(
                    BenchmarkComparison(
                        metric=table.metric,
                        sex=sex,
                        model=model,
                        strategy=strategy,
                        reproduced=float(means[j]),
                        published=published,
                        tolerance=tolerance,
                    )
                )
    return comparisons


def _format_value(value: float, best: bool) -> str:
    if np.isnan(value):
        return "n/a"
    return f"{value:.2f}{'*' if best else ''}"


def render_text(table: ReportTable) -> str:
    """Aligned text table, 2 decimals, '*' on each row's minimum, mean row per sex."""
    header = ["Country", "Sex"] + [f"{m.label} {s.label}" for m, s in table.columns]
    lines = []
    for sex in table.sexes:
        for (country, row_sex), row in zip(table.rows, table.values):
            if row_sex is sex:
                lines.append((country, sex.value, row))
        lines.append(("Mean", sex.value, table.mean_row(sex)))

    body = []
    for country, sex, row in lines:
        best = ReportTable.best_column(row)
        body.append([country, sex] + [_format_value(v, j == best) for j, v in enumerate(row)])

    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    title = f"{table.metric.label}, h = {table.horizon} (* = most accurate)"

    def fmt(cells: list[str]) -> str:
        first = [c.ljust(w) for c, w in zip(cells[:2], widths[:2])]
        rest = [c.rjust(w) for c, w in zip(cells[2:], widths[2:])]
        return "  ".join(first + rest).rstrip()

    out = [title, fmt(header), "  ".join("-" * w for w in widths)]
    out.extend(fmt(row) for row in body)
    return "\n".join(out) + "\n"


def render_verdicts(verdicts: Sequence[StrategyVerdict]) -> str:
    """One line per verdict: winner and margin."""
    lines = []
    for v in verdicts:
        tie = " (tie)" if v.tie else ""
        lines.append(
            f"{v.metric.label} h={v.horizon} {v.sex.value} {v.model.label}: "
            f"Partial {v.partial_mean:.2f} vs Full {v.full_mean:.2f} -> {v.winner.label}{tie}"
        )
    return "\n".join(lines) + ("\n" if lines else "")
