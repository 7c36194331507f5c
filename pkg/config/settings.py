"""
Configuration settings for structured low-rank recovery.
Loads from environment variables (prefix SLR_) with sensible defaults.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, field_validator


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="SLR_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="console")

    # Outputs
    output_dir: str = Field(default="./output")
    png_export: bool = Field(default=False)

    # Sweep
    sweep_workers: int = Field(default=1, ge=1)

    # Numerics
    default_filter_size: int = Field(default=15, ge=1)
    eig_hermitian_tol: float = Field(default=1e-8, gt=0.0)

    @field_validator("default_filter_size")
    @classmethod
    def _odd_filter(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("default_filter_size must be odd")
        return value

    @field_validator("log_format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        value = value.lower()
        if value not in ("console", "json"):
            raise ValueError("log_format must be 'console' or 'json'")
        return value

    @property
    def json_logs(self) -> bool:
        """Check if logs should be rendered as JSON lines."""
        return self.log_format == "json"


# Global settings instance
settings = Settings()
