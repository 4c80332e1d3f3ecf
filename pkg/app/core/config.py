"""
Application configuration using Pydantic Settings
"""
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings loaded from environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="WAVCYCLE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = Field(default="wavcyclegan")
    app_version: str = Field(default="1.0.0")

    # Reproducibility
    seed: int = Field(default=0, ge=0, description="Global seed for stochastic outputs")
    serial: bool = Field(
        default=True,
        description="Serial deterministic mode (deterministic torch kernels, no prefetch)",
    )

    # Compute
    threads: int = Field(default=1, ge=1, description="Internal parallelism degree")
    device: str = Field(default="cpu", description="Torch device for networks")

    # Data range
    data_range_lo: float = Field(default=0.0, description="Lower bound of valid samples (DN)")
    data_range_hi: float = Field(default=65535.0, description="Upper bound of valid samples (DN)")

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_format: str = Field(
        default="text",
        description="Log format: 'text' for terminals, 'json' for pipelines",
    )

    @property
    def data_range(self) -> tuple[float, float]:
        """Declared valid sample interval"""
        return (self.data_range_lo, self.data_range_hi)


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance

    Returns:
        Settings instance
    """
    return Settings()
