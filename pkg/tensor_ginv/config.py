import os
from typing import Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings

# Load environment variables from .env file
load_dotenv()


def _optional_float(name: str) -> Optional[float]:
    value = os.getenv(name, "")
    return float(value) if value.strip() else None


class Settings(BaseSettings):
    # Check tolerances
    TOLERANCE: float = float(os.getenv("TGINV_TOLERANCE", "1e-8"))
    PREDICATE_TOLERANCE: float = float(os.getenv("TGINV_PREDICATE_TOLERANCE", "1e-10"))

    # Rank truncation; None selects sigma_max * max(rows, cols) * eps
    RANK_TOLERANCE: Optional[float] = _optional_float("TGINV_RANK_TOLERANCE")
    CATALOG_RANK_TOLERANCE: float = float(os.getenv("TGINV_CATALOG_RANK_TOLERANCE", "1e-10"))

    # Jacobi kernels
    MAX_JACOBI_SWEEPS: int = int(os.getenv("TGINV_MAX_JACOBI_SWEEPS", "30"))

    # Catalog harness
    CATALOG_INSTANCES: int = int(os.getenv("TGINV_CATALOG_INSTANCES", "50"))
    EQUIVALENCE_INSTANCES: int = int(os.getenv("TGINV_EQUIVALENCE_INSTANCES", "512"))
    CATALOG_WORKERS: int = int(os.getenv("TGINV_CATALOG_WORKERS", "1"))

    # Random instance generation
    SEED: int = int(os.getenv("TGINV_SEED", "0"))

    # Logging
    LOG_LEVEL: str = os.getenv("TGINV_LOG_LEVEL", "WARNING")
    LOG_FORMAT: str = os.getenv(
        "TGINV_LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )

    class Config:
        case_sensitive = True
        extra = "ignore"


# Create settings instance
settings = Settings()
