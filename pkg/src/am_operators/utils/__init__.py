"""Utility modules for am-operators."""

from .logger import get_logger, setup_logger, setup_minimal_logger, trial_logger

__all__ = [
    "get_logger",
    "setup_logger",
    "setup_minimal_logger",
    "trial_logger",
]
