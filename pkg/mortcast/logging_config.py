"""Logging configuration for mortcast.

Console logging for CLI runs plus an initializer for backtest worker
processes, which start without the parent's handlers.
"""

import logging
import sys
from typing import Optional, Union

from mortcast.config import settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Third-party loggers that are only interesting when something breaks
QUIET_LOGGERS = ("matplotlib", "asyncio", "concurrent.futures")


def _resolve_level(level: Union[str, int, None]) -> int:
    if isinstance(level, int):
        return level
    return getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO)


def setup_logging(level: Union[str, int, None] = None, announce: bool = True) -> None:
    """Configure root logging for a mortcast process.

    Args:
        level: DEBUG, INFO, WARNING, ERROR or a logging constant
            (default MORTCAST_LOG_LEVEL)
        announce: Log the configured level once set up

    Sets up:
    - One stdout handler, so log lines interleave with CLI output
    - Timestamped `name - level - message` records
    - WARNING for chatty third-party loggers
    """
    log_level = _resolve_level(level)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    # Re-entering the CLI (or a test runner) must not stack handlers
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
    root_logger.addHandler(console_handler)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    if announce:
        logging.getLogger(__name__).info(
            f"Logging configured with level: {logging.getLevelName(log_level)}"
        )


def init_worker_logging(level: Optional[int] = None) -> None:
    """ProcessPoolExecutor initializer: same format and level as the parent."""
    setup_logging(level, announce=False)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance for a module.

    Args:
        name: Logger name (typically __name__ from calling module)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
