"""
Logging Setup
Structured JSON records on stderr; stdout stays free for reports
"""
import logging
import sys
from typing import Optional

from pythonjsonlogger import jsonlogger

from core.config import settings

_CONFIGURED = False


def setup_logging(level: Optional[str] = None, json: Optional[bool] = None) -> None:
    """
    Configure the root logger once

    Args:
        level: Log level name (default from settings)
        json: Emit JSON records (default from settings)
    """
    global _CONFIGURED
    if level is None:
        level = settings.LOG_LEVEL
    if json is None:
        json = settings.LOG_JSON

    handler = logging.StreamHandler(sys.stderr)
    if json:
        formatter = jsonlogger.JsonFormatter(
            "%(asctime)s %(levelname)s %(name)s %(message)s"
        )
    else:
        formatter = logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
    handler.setFormatter(formatter)

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(level.upper())
    _CONFIGURED = True


def get_logger(name: str) -> logging.Logger:
    """Return a module logger, configuring logging on first use"""
    if not _CONFIGURED:
        setup_logging()
    return logging.getLogger(name)
