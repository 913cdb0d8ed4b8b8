"""Tests for experiment config parsing and the pydantic schema."""
import pytest

from mortcast.exceptions import ConfigInvalid, MissingData
from mortcast.models.backtest import StrategyKind
from mortcast.models.fitted import ModelKind
from mortcast.models.surface import AgeRange, Sex
from mortcast.schemas.experiment import (
    build_experiment_config,
    load_experiment_config,
    parse_config_text,
)


class TestParseConfigText:
    """Tests for the flat key=value reader."""

    def test_comments_and_blank_lines(self):
        """Comments and blank lines are skipped, values are stripped."""
        text = "holdout = 5  # short run\n\n# full-line comment\ncountries=AUS, SWE\n"
        assert parse_config_text(text) == {"holdout": "5", "countries": "AUS, SWE"}

    def test_empty_text(self):
        """An empty file has no fields."""
        assert parse_config_text("") == {}

    def test_duplicate_key(self):
        """A repeated key names its line."""
        with pytest.raises(ConfigInvalid) as exc_info:
            parse_config_text("seed = 1\nseed = 2\n")
        assert exc_info.value.errors == ["Line 2: duplicate key 'seed'"]

    def test_line_without_equals(self):
        """Lines that are not key=value are reported, all at once."""
        with pytest.raises(ConfigInvalid) as exc_info:
            parse_config_text("nonsense\nseed = 1\n= 4\n")
        assert exc_info.value.errors == [
            "Line 1: expected key=value, got 'nonsense'",
            "Line 3: expected key=value, got '= 4'",
        ]


class TestBuildExperimentConfig:
    """Tests for field validation."""

    def test_unknown_key(self):
        """Unknown keys are named in the error."""
        with pytest.raises(ConfigInvalid) as exc_info:
            build_experiment_config({"colour": "red"})
        assert exc_info.value.errors == ["Unknown key: colour"]

    def test_holdout_zero(self):
        """holdout must be at least 1."""
        with pytest.raises(ConfigInvalid) as exc_info:
            build_experiment_config({"holdout": "0"})
        assert exc_info.value.errors[0].startswith("holdout:")

    def test_alpha_bounds(self):
        """alpha must lie strictly inside (0, 1)."""
        with pytest.raises(ConfigInvalid):
            build_experiment_config({"alpha": "1"})

    def test_n_sims_minimum(self):
        """Fewer than 100 paths are refused."""
        with pytest.raises(ConfigInvalid):
            build_experiment_config({"n_sims": "50"})

    def test_list_values(self):
        """Comma-separated values become typed lists."""
        config = build_experiment_config(
            {"countries": "aus, swe", "models": "apc,plat", "sexes": "m", "strategies": "partial"}
        )
        assert config.countries == ["AUS", "SWE"]
        assert config.models == [ModelKind.APC, ModelKind.PLAT]
        assert config.sexes == [Sex.MALE]
        assert config.strategies == [StrategyKind.PARTIAL]

    def test_unknown_model(self):
        """Model names outside the five known ones are rejected."""
        with pytest.raises(ConfigInvalid) as exc_info:
            build_experiment_config({"models": "cbd"})
        assert exc_info.value.errors[0].startswith("models.0:")

    def test_defaults(self):
        """An empty config runs every model, sex and strategy."""
        config = build_experiment_config({})
        assert config.models == list(ModelKind)
        assert config.sexes == [Sex.FEMALE, Sex.MALE]
        assert config.holdout == 30
        assert config.alpha == 0.2
        assert len(config.countries) == 19
        assert config.last_year("EW") == 2016

    def test_last_years_merge(self):
        """Overrides replace single entries of the default table."""
        config = build_experiment_config({"last_years": "aus:2010"})
        assert config.last_year("AUS") == 2010
        assert config.last_year("SWE") == 2016
        assert config.last_year("XYZ") is None

    def test_last_years_bad_item(self):
        """Items without a colon are rejected."""
        with pytest.raises(ConfigInvalid) as exc_info:
            build_experiment_config({"last_years": "AUS2010"})
        assert "COUNTRY:YEAR" in exc_info.value.errors[0]

    def test_age_ranges(self):
        """Strategies are built from the configured ages."""
        config = build_experiment_config({"retiree_lower_age": "65", "open_age": "95"})
        assert config.retiree_range == AgeRange(65, 95, True)
        assert config.full_range == AgeRange(0, 95, True)
        assert config.strategy(StrategyKind.PARTIAL).fit_range == AgeRange(65, 95, True)
        assert config.strategy(StrategyKind.FULL).fit_range == AgeRange(0, 95, True)

    def test_model_specs(self):
        """Plat terms and optimizer settings reach the model specs."""
        config = build_experiment_config(
            {"models": "lc-poisson,plat", "plat_period_terms": "3", "max_iter": "50", "tol": "1e-6"}
        )
        poisson, plat = config.model_specs()
        assert poisson.plat_period_terms is None
        assert plat.plat_period_terms == 3
        assert poisson.max_iter == 50 and plat.tol == 1e-6


class TestLoadExperimentConfig:
    """Tests for reading config files."""

    def test_load_with_overrides(self, tmp_path):
        """File values load; non-None overrides win."""
        path = tmp_path / "experiment.txt"
        path.write_text("countries = AUS\nseed = 1\nholdout = 5\n", encoding="utf-8")

        config = load_experiment_config(path, seed=7, jobs=None)

        assert config.countries == ["AUS"]
        assert config.seed == 7
        assert config.holdout == 5
        assert config.jobs == 1

    def test_missing_file(self, tmp_path):
        """A missing file raises MissingData."""
        with pytest.raises(MissingData):
            load_experiment_config(tmp_path / "absent.txt")

    def test_unknown_key_in_file(self, tmp_path):
        """Unknown keys in a file surface as ConfigInvalid."""
        path = tmp_path / "experiment.txt"
        path.write_text("holdot = 5\n", encoding="utf-8")
        with pytest.raises(ConfigInvalid) as exc_info:
            load_experiment_config(path)
        assert exc_info.value.errors == ["Unknown key: holdot"]
