"""
Logging configuration for the review sentiment toolkit.
All modules log through loguru; this module owns the sinks.
"""
import os
import sys
from typing import Optional

from loguru import logger

DEFAULT_LEVEL = "INFO"
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"
CONSOLE_FORMAT = "<level>{level: <8}</level> | {message}"


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None, quiet: bool = False) -> None:
    """
    Replace loguru's default sink with the toolkit's console and file sinks.

    Args:
        level: Console level; falls back to REVIEWSENT_LOG_LEVEL, then INFO.
        log_file: Optional path of a run log written at DEBUG.
        quiet: Only warnings and errors reach the console.
    """
    console_level = (level or os.getenv("REVIEWSENT_LOG_LEVEL", DEFAULT_LEVEL)).upper()
    if quiet:
        console_level = "WARNING"

    logger.remove()
    logger.add(sys.stderr, level=console_level, format=CONSOLE_FORMAT)
    if log_file:
        logger.add(log_file, level="DEBUG", format=FILE_FORMAT, mode="w", encoding="utf-8")
