"""Reading and writing HMD 1x1 text tables.

Layout: a free-text header block, a column header line
`Year Age Female Male Total`, then one whitespace-separated row per
(year, age). The top age is written with a trailing '+' (e.g. "110+") and
missing values are ".".
"""
from typing import Iterable, Optional

import numpy as np

from mortcast.exceptions import EmptyInput, InconsistentYears, MalformedRow
from mortcast.logging_config import get_logger
from mortcast.models.surface import RateKind, Sex

logger = get_logger(__name__)

MISSING_TOKEN = "."
COLUMNS = ("Year", "Age", "Female", "Male", "Total")

# (age, year) -> value, None marks a missing cell
HmdTable = dict[tuple[int, int], Optional[float]]


def _parse_age(token: str, line_no: int) -> int:
    text = token[:-1] if token.endswith("+") else token
    if not text.isdigit():
        raise MalformedRow([f"Line {line_no}: age {token!r} is not an integer age label"])
    return int(text)


def _parse_value(token: str, line_no: int) -> Optional[float]:
    if token == MISSING_TOKEN:
        return None
    try:
        value = float(token)
    except ValueError:
        raise MalformedRow([f"Line {line_no}: value {token!r} is not numeric"]) from None
    if not np.isfinite(value) or value < 0:
        raise MalformedRow([f"Line {line_no}: value {token!r} must be finite and >= 0"])
    return value


def parse_hmd_table(text: "str | Iterable[str]", kind: RateKind, sex: Sex) -> HmdTable:
    """Parse one HMD 1x1 table for one sex.

    Lines up to and including the `Year Age ...` header are skipped; text
    without such a header is read as body rows only. Blank lines are
    ignored, every other body line must be a complete row.

    Args:
        text: File content (string or iterable of lines)
        kind: Which table this is (used in messages only)
        sex: Column to extract

    Returns:
        Mapping (age, year) -> value, None for "."

    Raises:
        MalformedRow: Wrong column count or a non-numeric value
        EmptyInput: No data rows
        InconsistentYears: Same (age, year) appears twice

    Examples:
        >>> parse_hmd_table("1950 0 0.02 0.03 0.025", RateKind.RATES, Sex.MALE)
        {(0, 1950): 0.03}
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    sex = Sex.parse(sex)
    column = COLUMNS.index(sex.column)

    start = 0
    for idx, line in enumerate(lines):
        tokens = line.split()
        if tokens and tokens[0] == "Year":
            start = idx + 1
            break

    table: HmdTable = {}
    for idx in range(start, len(lines)):
        line_no = idx + 1
        tokens = lines[idx].split()
        if not tokens:
            continue
        if len(tokens) != len(COLUMNS):
            raise MalformedRow(
                [f"Line {line_no}: expected {len(COLUMNS)} columns, got {len(tokens)}"]
            )
        if not tokens[0].isdigit():
            raise MalformedRow([f"Line {line_no}: year {tokens[0]!r} is not an integer"])
        year = int(tokens[0])
        age = _parse_age(tokens[1], line_no)
        # Validate every value column so malformed rows never pass silently
        values = [_parse_value(tok, line_no) for tok in tokens[2:]]
        key = (age, year)
        if key in table:
            raise InconsistentYears([f"Line {line_no}: duplicate entry for age {age}, year {year}"])
        table[key] = values[column - 2]

    if not table:
        raise EmptyInput([f"No data rows found in {kind.value} input"])

    logger.debug(f"Parsed {len(table)} {kind.value} cells for sex {sex.value}")
    return table


def table_grid(table: HmdTable) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct ages and years present in a parsed table."""
    ages = np.array(sorted({age for age, _ in table}), dtype=np.int64)
    years = np.array(sorted({year for _, year in table}), dtype=np.int64)
    return ages, years


def table_to_matrix(table: HmdTable, ages: np.ndarray, years: np.ndarray) -> np.ndarray:
    """Lay a parsed table out as an ages x years matrix (NaN for missing)."""
    matrix = np.full((len(ages), len(years)), np.nan)
    age_pos = {int(a): i for i, a in enumerate(ages)}
    year_pos = {int(y): j for j, y in enumerate(years)}
    for (age, year), value in table.items():
        if value is not None and age in age_pos and year in year_pos:
            matrix[age_pos[age], year_pos[year]] = value
    return matrix


def _format_value(value: float, kind: RateKind) -> str:
    if not np.isfinite(value):
        return MISSING_TOKEN
    if kind is RateKind.RATES:
        return f"{value:.6f}"
    return f"{value:.2f}"


def format_hmd_table(
    country: str,
    kind: RateKind,
    ages: np.ndarray,
    years: np.ndarray,
    female: np.ndarray,
    male: np.ndarray,
    open_upper: bool = True,
) -> str:
    """Write an HMD 1x1 table (both sexes) as text.

    Totals are summed for counts; for rates the total column is left
    missing because it is not derivable without counts.
    """
    header = [
        f"{country}, {kind.value.replace('_', ' ')} (synthetic)",
        "",
        "{:>6}{:>8}{:>14}{:>14}{:>14}".format(*COLUMNS),
    ]
    rows = []
    top = len(ages) - 1
    for j, year in enumerate(years):
        for i, age in enumerate(ages):
            label = f"{age}+" if open_upper and i == top else str(age)
            f_val, m_val = female[i, j], male[i, j]
            if kind is RateKind.RATES:
                total = MISSING_TOKEN
            else:
                total = _format_value(f_val + m_val, kind)
            rows.append(
                "{:>6}{:>8}{:>14}{:>14}{:>14}".format(
                    int(year),
                    label,
                    _format_value(f_val, kind),
                    _format_value(m_val, kind),
                    total,
                )
            )
    return "\n".join(header + rows) + "\n"
