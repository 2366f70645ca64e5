"""Configuration management for the application."""

import os
from typing import Any

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

load_dotenv()


class Config(BaseModel):
    """Application configuration."""

    log_level: str = "INFO"
    log_format: str = "text"
    truncation: int = Field(default=512, ge=1, le=4096)
    tolerance: float = Field(default=1e-10, gt=0.0)
    rank_cutoff: float = Field(default=1e-10, gt=0.0)
    psd_slack: float = Field(default=1e-8, gt=0.0)
    projector_tolerance: float = Field(default=1e-8, gt=0.0)
    paranormal_grid_size: int = Field(default=64, ge=2)
    paranormal_trials: int = Field(default=1000, ge=0)
    discrete_listing_limit: int = Field(default=50, ge=1)
    default_seed: int = Field(default=7, ge=0)
    workers: int = Field(default=1, ge=1, le=64)
    include_timing: bool = False
    descriptions_dir: str = "config/descriptions"

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of: {', '.join(sorted(valid_levels))}")
        return v.upper()

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        """Validate log format."""
        if v not in {"json", "text"}:
            raise ValueError("Log format must be 'json' or 'text'")
        return v

    @classmethod
    def from_env(cls) -> "Config":
        """Load configuration from environment variables."""
        return cls(
            log_level=os.getenv("AM_LOG_LEVEL", "INFO"),
            log_format=os.getenv("AM_LOG_FORMAT", "text"),
            truncation=int(os.getenv("AM_TRUNCATION", "512")),
            tolerance=float(os.getenv("AM_TOLERANCE", "1e-10")),
            rank_cutoff=float(os.getenv("AM_RANK_CUTOFF", "1e-10")),
            psd_slack=float(os.getenv("AM_PSD_SLACK", "1e-8")),
            projector_tolerance=float(os.getenv("AM_PROJECTOR_TOLERANCE", "1e-8")),
            paranormal_grid_size=int(os.getenv("AM_PARANORMAL_GRID", "64")),
            paranormal_trials=int(os.getenv("AM_PARANORMAL_TRIALS", "1000")),
            discrete_listing_limit=int(os.getenv("AM_DISCRETE_LIMIT", "50")),
            default_seed=int(os.getenv("AM_SEED", "7")),
            workers=int(os.getenv("AM_WORKERS", "1")),
            include_timing=os.getenv("AM_INCLUDE_TIMING", "false").lower() == "true",
            descriptions_dir=os.getenv("AM_DESCRIPTIONS_DIR", "config/descriptions"),
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return self.model_dump()
