"""
Configuration management for the instanton engine
Uses Pydantic Settings for type-safe configuration with environment variables
"""

from pydantic_settings import BaseSettings
from pydantic import Field, validator
from typing import List


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Application Configuration
    env: str = Field(default="development", description="Environment: development, staging, production")
    api_host: str = Field(default="0.0.0.0", description="API host")
    api_port: int = Field(default=8000, description="API port")
    log_level: str = Field(default="INFO", description="Logging level")
    debug: bool = Field(default=False, description="Debug mode")

    # Default computation orders
    default_lambda_order: int = Field(default=4, description="Default instanton number of Lambda-expansions")
    default_t_order: int = Field(default=9, description="Default highest t-power of blow-up series")
    default_xz_degree: int = Field(default=8, description="Default weighted (x, z)-degree D")
    blowup_lattice_bound: int = Field(default=3, description="Bound on |k_1| in the blow-up lattice sum")
    toric_lambda_order: int = Field(default=2, description="Default instanton number of the P^2 fixed-point product")

    # Resource bounds
    max_instanton_number: int = Field(default=6, description="Largest accepted instanton number")
    max_t_order: int = Field(default=15, description="Largest accepted t-order")
    max_xz_degree: int = Field(default=12, description="Largest accepted (x, z)-degree")

    # Performance
    worker_count: int = Field(default=1, description="Number of worker threads for fixed-point sums")

    # Data
    surfaces_dir: str = Field(default="data/surfaces", description="Directory of shipped surface data")
    random_seed: int = Field(default=20240101, description="Seed for randomized property tests")

    # CORS Configuration
    cors_origins: List[str] = Field(
        default=["http://localhost:3000", "http://localhost:8000"],
        description="Allowed CORS origins"
    )
    cors_allow_credentials: bool = Field(default=True, description="Allow credentials in CORS")

    @validator("log_level", pre=True)
    def normalize_log_level(cls, v):
        """Normalize the logging level to upper case"""
        return str(v).upper()

    @validator(
        "default_lambda_order", "default_t_order", "default_xz_degree", "blowup_lattice_bound", "toric_lambda_order",
        "max_instanton_number", "max_t_order", "max_xz_degree", "worker_count",
    )
    def check_positive(cls, v):
        """Orders and bounds must be positive"""
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @validator("cors_origins", pre=True)
    def parse_cors_origins(cls, v):
        """Parse CORS origins from string or list"""
        if isinstance(v, str):
            return [origin.strip() for origin in v.split(",")]
        return v

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get application settings instance"""
    return settings
