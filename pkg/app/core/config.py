# app/core/config.py

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    PROJECT_NAME: str = "Correlated Channel Purity Toolkit"
    VERSION: str = "1.0.0"

    # Output settings
    OUTPUT_DIR: str = "output"
    DEFAULT_SEED: int = 20240229
    WORKERS: int = 1

    # Logging settings
    LOG_LEVEL: str = "WARNING"
    JSON_LOGS: bool = True
    LOG_TO_FILE: bool = False
    LOGS_DIR: str = "logs"

    # Numerical tolerances
    HERMITIAN_TOL: float = 1e-10
    UNITARY_TOL: float = 1e-12
    NORMALIZATION_TOL: float = 1e-12
    JACOBI_OFFDIAG_TOL: float = 1e-14
    CLIP_TOL: float = 1e-10
    CONJECTURE_TOL: float = 1e-9

    # Environment settings
    ENVIRONMENT: str = "development"
    DEBUG: bool = False

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True)


settings = Settings()
