"""
Logging configuration for command-line runs.
"""
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

from ..core.config import LOGGER_NAME, LOGS_DIR


def setup_cli_logging(log_level: str = "INFO", log_dir: Optional[Path] = None) -> logging.Logger:
    """
    Set up logging for one CLI invocation.

    Logs go to a date-stamped file (always DEBUG) and to stdout at the
    requested level.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_dir: Root of the log tree; defaults to data/logs/cli

    Returns:
        Configured application logger
    """
    today = datetime.now().strftime("%Y-%m-%d")
    run_log_dir = Path(log_dir or LOGS_DIR / "cli") / today
    run_log_dir.mkdir(parents=True, exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = run_log_dir / f"run_{timestamp}.log"

    level = getattr(logging, log_level.upper(), logging.INFO)
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG)

    # Remove existing handlers to avoid duplicates across invocations
    for handler in list(logger.handlers):
        handler.close()
    logger.handlers.clear()
    logger.propagate = False

    file_handler = logging.FileHandler(log_file, encoding='utf-8')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    ))
    logger.addHandler(file_handler)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter(
        '%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    ))
    logger.addHandler(console_handler)

    logger.info(f"Logging configured. Log file: {log_file}")
    logger.debug(f"Log level: {log_level}")

    return logger
