"""
Metadata:
    Project: ThinPrice
    File Name: logs.py
    File Path: thinprice/utils/logs.py
    Module: Logging Setup
    Created: 2026-10-18
    Modified: 2026-10-18
    Version: 0.1.0
    Author: ThinPrice Development Team

Description:
    Routes the standard library loggers of every ThinPrice module through
    a Rich handler on stderr. Library modules only ever call
    logging.getLogger(__name__); the CLI entry point calls
    configure_logging() once.

Configuration:
    THINPRICE_LOG: DEBUG | INFO | WARNING | ERROR (default WARNING)
"""

import logging
import os
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

LOG_ENV_VAR = "THINPRICE_LOG"
DEFAULT_LEVEL = "WARNING"
_VALID_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

stderr_console = Console(stderr=True)


def resolve_level(value: Optional[str]) -> tuple[int, bool]:
    """
    Map a verbosity string to a logging level.

    Returns:
        tuple[int, bool]: (level, recognised). Unrecognised or empty
        values resolve to WARNING with recognised=False.
    """
    if not value:
        return logging.WARNING, True
    name = value.strip().upper()
    if name not in _VALID_LEVELS:
        return logging.WARNING, False
    return int(getattr(logging, name)), True


def configure_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Attach a RichHandler to the package logger.

    Args:
        level (str, optional): Explicit level; defaults to $THINPRICE_LOG

    Returns:
        logging.Logger: The configured "thinprice" logger

    Notes:
        Idempotent: existing Rich handlers on the package logger are
        replaced, so repeated CLI invocations in one process (tests) do not
        duplicate output.
    """
    raw = level if level is not None else os.environ.get(LOG_ENV_VAR)
    resolved, recognised = resolve_level(raw)

    logger = logging.getLogger("thinprice")
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)

    handler = RichHandler(
        console=stderr_console,
        show_path=False,
        rich_tracebacks=False,
        markup=False,
    )
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(resolved)
    logger.propagate = False

    if not recognised:
        logger.warning("Unrecognised %s value %r; using %s", LOG_ENV_VAR, raw, DEFAULT_LEVEL)
    return logger
