"""Logging configuration using Loguru."""

import sys
from typing import Any

from loguru import logger

from ..config import Config

PACKAGE = "am_operators"

TEXT_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[component]}</cyan> | {message}"
)


def _component(name: str) -> str:
    return name.removeprefix(f"{PACKAGE}.") or PACKAGE


def setup_logger(config: Config) -> None:
    """Configure loguru logger based on config.

    Records carry the bound ``component``; suite trials also carry ``suite`` and
    ``trial``, which end up in the ``extra`` field of JSON records. The sink is
    queued when suites run on several worker threads.
    """
    logger.remove()
    logger.configure(extra={"component": PACKAGE})

    logger.add(
        sys.stderr,
        format=TEXT_FORMAT,
        level=config.log_level,
        serialize=config.log_format == "json",
        enqueue=config.workers > 1,
        backtrace=False,
        diagnose=config.log_level == "DEBUG",
    )


def setup_minimal_logger(level: str = "WARNING") -> None:
    """Configure a minimal logger for library use in scripts and notebooks.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL).
    """
    logger.remove()
    logger.configure(extra={"component": PACKAGE})
    logger.add(sys.stderr, format="<level>{level}</level>: {message}", level=level.upper(), colorize=True)


def get_logger(name: str) -> Any:
    """Logger bound to a package component, e.g. ``pipeline`` for ``am_operators.pipeline``."""
    return logger.bind(component=_component(name))


def trial_logger(suite: str, trial: int) -> Any:
    """Logger for one property-suite trial."""
    return logger.bind(component="suites", suite=suite, trial=trial)
