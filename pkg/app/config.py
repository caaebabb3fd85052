from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # App
    APP_NAME: str = "Parity Interferometry API"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Output directory for reproduce-fig2
    OUTPUT_DIR: str = "output"

    # Size limits
    N_MAX: int = 40
    ORACLE_MAX_N: int = 10

    # Phase optimisation
    PHI_GRID_POINTS: int = 2001
    PHI_FLOOR: float = 1e-6
    GOLDEN_TOL: float = 1e-10

    # Numerics
    FD_STEP: float = 1e-5
    DERIVATIVE_RTOL: float = 1e-7
    IMAG_TOL: float = 1e-11
    DIVERGENCE_FLOOR: float = 1e-300
    VERIFY_TOL: float = 1e-10

    # Intelligent states
    DEFAULT_ETA: float = 10.0
    DEFAULT_M0: float = 0.0
    ETA_ONE_SUBSTITUTE: float = 1.0 + 1e-6

    # Transmission sweep (loss figure)
    FIG2_LAMBDA_MIN: float = 0.5
    FIG2_LAMBDA_MAX: float = 1.0
    FIG2_GRID_POINTS: int = 101

    # Output
    CSV_SIGNIFICANT_DIGITS: int = 12

    # Server
    HOST: str = "0.0.0.0"
    PORT: int = 8000

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"


settings = Settings()

# Every factorial in the Wigner-d and Q_mn formulas stays below this bound
LOG_FACTORIAL_MAX = 4 * settings.N_MAX + 4

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
