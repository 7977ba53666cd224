"""
Application Configuration
"""
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings"""

    # Application
    APP_NAME: str = "PsiArith-Verify"
    APP_VERSION: str = "1.0.0"
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = True

    # API
    API_HOST: str = "0.0.0.0"
    API_PORT: int = 8000

    # Hermitian forms
    TOL: float = 1e-8
    BETA: float = (1.0 + 2.0 ** 1.5) / 2.0
    CONTOUR_C: float = 2.0
    K_CAP: int = 2 ** 20
    XI_CUT: float = 64.0
    TABLE_AXIS_CAP: int = 100_000

    # Vertical integrals
    DEFAULT_HEIGHT: float = 60.0
    MAX_HEIGHT: float = 8192.0

    # Quadrature
    GL_ORDER: int = 32
    QUAD_REL_TOL: float = 1e-10
    QUAD_ABS_TOL: float = 1e-15
    MAX_PANELS: int = 20_000

    # Zeta
    ZETA_HEIGHT_ENVELOPE: float = 1e4
    ZETA_BERNOULLI_TERMS: int = 30

    # Arithmetic
    TRIAL_DIVISION_LIMIT: int = 10 ** 7
    PRIME_SEARCH_CAP: int = 10 ** 7

    # Test functions
    FLAT_WIDTH: float = 1.0

    # Reproducibility
    SEED: int = 0

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
