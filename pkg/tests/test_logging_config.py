"""Tests for logging setup."""
import logging

import pytest

from mortcast.logging_config import get_logger, init_worker_logging, setup_logging


@pytest.fixture
def root_logger():
    """Root logger restored to its previous handlers and level afterwards."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield root
    root.handlers[:] = handlers
    root.setLevel(level)


class TestSetupLogging:
    """Tests for setup_logging."""

    def test_level_by_name(self, root_logger):
        """Level names are case-insensitive."""
        setup_logging("debug")
        assert root_logger.level == logging.DEBUG

    def test_unknown_level_falls_back_to_info(self, root_logger):
        """An unknown name gives INFO."""
        setup_logging("chatty")
        assert root_logger.level == logging.INFO

    def test_repeated_setup_keeps_one_handler(self, root_logger):
        """Calling twice does not stack handlers."""
        setup_logging("INFO")
        setup_logging("WARNING")
        assert len(root_logger.handlers) == 1
        assert root_logger.handlers[0].level == logging.WARNING

    def test_third_party_loggers_quieted(self, root_logger):
        """matplotlib chatter is raised to WARNING."""
        setup_logging("DEBUG")
        assert logging.getLogger("matplotlib").level == logging.WARNING

    def test_worker_initializer_takes_numeric_level(self, root_logger):
        """Workers receive the parent's numeric level."""
        init_worker_logging(logging.ERROR)
        assert root_logger.level == logging.ERROR


class TestGetLogger:
    """Tests for get_logger."""

    def test_named_logger(self):
        """Loggers are named after their module."""
        assert get_logger("mortcast.services").name == "mortcast.services"
