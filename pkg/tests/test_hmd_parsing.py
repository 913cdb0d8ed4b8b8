"""Tests for HMD 1x1 table parsing and formatting."""
import numpy as np
import pytest

from mortcast.exceptions import EmptyInput, InconsistentYears, MalformedRow
from mortcast.models.surface import RateKind, Sex
from mortcast.utils.hmd_parsing import (
    format_hmd_table,
    parse_hmd_table,
    table_grid,
    table_to_matrix,
)

SAMPLE = """Australia, Death rates (period 1x1)
Last modified: 01 Jan 2020

  Year      Age       Female         Male        Total
  1950        0     0.020000     0.030000     0.025000
  1950        1     0.002000     0.003000     0.002500
  1950      2+      0.100000            .     0.100000
  1951        0     0.019000     0.029000     0.024000
  1951        1     0.001900     0.002900     0.002400
  1951      2+      0.090000     0.120000     0.100000
"""


class TestParseHmdTable:
    """Tests for parse_hmd_table."""

    def test_reads_selected_sex(self):
        """Female column values are keyed by (age, year)."""
        table = parse_hmd_table(SAMPLE, RateKind.RATES, Sex.FEMALE)
        assert table[(0, 1950)] == 0.02
        assert table[(2, 1951)] == 0.09
        assert len(table) == 6

    def test_missing_token_becomes_none(self):
        """'.' is read as a missing cell."""
        table = parse_hmd_table(SAMPLE, RateKind.RATES, "Male")
        assert table[(2, 1950)] is None
        assert table[(2, 1951)] == 0.12

    def test_open_age_label(self):
        """'110+' style labels parse to the integer age."""
        table = parse_hmd_table("1950 110+ 0.5 0.6 0.55", RateKind.RATES, Sex.FEMALE)
        assert table == {(110, 1950): 0.5}

    def test_headerless_input(self):
        """Text without the column header is read as body rows."""
        table = parse_hmd_table("1950 0 0.02 0.03 0.025", RateKind.RATES, Sex.MALE)
        assert table == {(0, 1950): 0.03}

    def test_wrong_column_count(self):
        """A short row raises MalformedRow naming the line."""
        with pytest.raises(MalformedRow, match="Line 2"):
            parse_hmd_table("1950 0 0.1 0.1 0.1\n1950 1 0.1 0.1", RateKind.RATES, Sex.FEMALE)

    def test_non_numeric_value(self):
        """Any non-numeric value column is rejected, not only the selected one."""
        with pytest.raises(MalformedRow):
            parse_hmd_table("1950 0 0.1 abc 0.1", RateKind.RATES, Sex.FEMALE)

    def test_negative_value(self):
        """Negative values are malformed."""
        with pytest.raises(MalformedRow):
            parse_hmd_table("1950 0 -0.1 0.1 0.1", RateKind.RATES, Sex.FEMALE)

    def test_empty_input(self):
        """A header with no rows raises EmptyInput."""
        with pytest.raises(EmptyInput):
            parse_hmd_table("Year Age Female Male Total\n\n", RateKind.DEATHS, Sex.FEMALE)

    def test_duplicate_cell(self):
        """The same (age, year) twice raises InconsistentYears."""
        text = "1950 0 0.1 0.1 0.1\n1950 0 0.2 0.2 0.2"
        with pytest.raises(InconsistentYears):
            parse_hmd_table(text, RateKind.RATES, Sex.FEMALE)


class TestTableLayout:
    """Tests for table_grid and table_to_matrix."""

    def test_grid_and_matrix(self):
        """Missing cells become NaN in the matrix."""
        table = parse_hmd_table(SAMPLE, RateKind.RATES, Sex.MALE)
        ages, years = table_grid(table)
        assert ages.tolist() == [0, 1, 2]
        assert years.tolist() == [1950, 1951]
        matrix = table_to_matrix(table, ages, years)
        assert matrix.shape == (3, 2)
        assert np.isnan(matrix[2, 0])
        assert matrix[0, 1] == 0.029


class TestFormatHmdTable:
    """Tests for format_hmd_table."""

    def test_output_parses_back(self):
        """Formatted text is readable by the parser, top age marked open."""
        ages = np.arange(3)
        years = np.array([2000, 2001])
        female = np.array([[0.01, 0.02], [0.001, 0.002], [0.1, 0.2]])
        male = female * 2
        text = format_hmd_table("TST", RateKind.RATES, ages, years, female, male)

        assert "2+" in text
        table = parse_hmd_table(text, RateKind.RATES, Sex.MALE)
        assert table[(2, 2001)] == pytest.approx(0.4)

    def test_counts_total_is_sum(self):
        """Count tables carry female + male in the total column."""
        ages = np.arange(1)
        years = np.array([2000])
        text = format_hmd_table(
            "TST", RateKind.DEATHS, ages, years, np.array([[10.0]]), np.array([[5.5]])
        )
        row = text.strip().splitlines()[-1].split()
        assert row[-1] == "15.50"

    def test_nan_written_as_missing(self):
        """NaN values are written as '.'."""
        text = format_hmd_table(
            "TST", RateKind.RATES, np.arange(1), np.array([2000]),
            np.array([[np.nan]]), np.array([[0.1]]),
        )
        table = parse_hmd_table(text, RateKind.RATES, Sex.FEMALE)
        assert table[(0, 2000)] is None
