"""Logging for the footprint localizer.

Console output goes to stderr so commands can print JSON documents on
stdout. The optional log file records thread names, which tells the
hypothesis-evaluation workers apart.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

from src.config import config

LOGGER_NAME = "footprint_localizer"

CONSOLE_FORMAT = "%(levelname)s - %(message)s"
FILE_FORMAT = "%(asctime)s %(levelname)-8s [%(threadName)s] %(module)s:%(lineno)d %(message)s"


def _level(name: str) -> int:
    return getattr(logging, name.upper())


def setup_logger(
    name: str = LOGGER_NAME,
    level: Optional[str] = None,
    log_file: Optional[str] = None,
) -> logging.Logger:
    """
    Build the localizer logger once; later calls return it unchanged.

    Args:
        name: Logger name
        level: Threshold for the logger itself, ``LOG_LEVEL`` otherwise
        log_file: Debug-level log file, ``LOG_FILE`` otherwise; none when both are empty
    """
    log = logging.getLogger(name)
    log.setLevel(_level(level or config.log_level))
    if log.handlers:
        return log

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(logging.INFO)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    log.addHandler(console)

    target = log_file or config.log_file
    if target:
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, mode="a", encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
        log.addHandler(file_handler)
    return log


def set_console_level(level: str) -> None:
    """Move the console threshold for ``--quiet`` / ``--verbose``; the file keeps everything."""
    for handler in logger.handlers:
        if not isinstance(handler, logging.FileHandler):
            handler.setLevel(_level(level))
    if _level(level) < logger.level:
        logger.setLevel(_level(level))


logger = setup_logger()
