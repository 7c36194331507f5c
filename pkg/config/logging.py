"""structlog setup shared by the command line and the library."""

import logging
from typing import Optional

import structlog

from .settings import settings


def configure_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    """
    Configure structlog processors and the minimum log level.

    Args:
        level: Level name (DEBUG, INFO, ...); defaults to settings.log_level
        fmt: "console" or "json"; defaults to settings.log_format
    """
    level_name = (level or settings.log_level).upper()
    numeric_level = getattr(logging, level_name, logging.INFO)
    json_logs = fmt.lower() == "json" if fmt else settings.json_logs
    renderer = (
        structlog.processors.JSONRenderer()
        if json_logs
        else structlog.dev.ConsoleRenderer(colors=False)
    )

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        cache_logger_on_first_use=False,
    )
