"""
Application Configuration and Settings Management

This module defines the numerical and runtime configuration of the murmurations
toolkit using Pydantic Settings for type-safe environment variable management.
The configuration covers L-function evaluation accuracy, zero isolation,
murmuration series grids, jump detection and worker parallelism.

Configuration Sources (in order of precedence):
1. Environment variables (highest priority)
2. .env file in the working directory
3. Default values defined in this module (lowest priority)

Environment Setup:
- Desk runs: defaults are tuned for conductors up to ~10^4 and heights up to ~250
- Larger runs: raise SHIFT_TERMS_MIN / EM_TERMS together, never only one of them
- Testing: override settings per test with monkeypatch on the singleton

Dependencies:
- Pydantic Settings: Type-safe configuration management with validation
- OS module: Environment variable access
"""

import os

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """
    Toolkit settings with type validation and environment variable support.

    All settings can be overridden via environment variables using the same
    name as the class attribute. THREADS and LOG_LEVEL additionally honour the
    MURMUR_THREADS and MURMUR_LOG_LEVEL variables used by the command line.
    """

    # Runtime
    THREADS: int = int(
        os.getenv("MURMUR_THREADS", "4")
    )  # Worker threads for per-member and per-character evaluation
    LOG_LEVEL: str = os.getenv("MURMUR_LOG_LEVEL", "INFO")

    # L-function evaluation (Hurwitz zeta via Euler-Maclaurin)
    ABS_TOL: float = 1e-9  # Target absolute error of L-values
    EM_TERMS: int = 12  # Bernoulli correction depth
    SHIFT_TERMS_MIN: int = 50  # Direct terms before the Euler-Maclaurin tail

    # Zero isolation on the critical line
    ZERO_TOLERANCE: float = 1e-6  # Final bracket width of every reported zero
    ZERO_COUNT_SLACK_LOG: float = 2.0  # Slack = a*log(qT) + b around N(T)
    ZERO_COUNT_SLACK_CONST: float = 5.0
    GRID_REFINEMENTS: int = 4  # Grid halvings allowed after a count mismatch
    CENTRAL_ZERO_FLOOR: float = 1e-4  # Brackets below this ordinate are flagged
    REALITY_TOL: float = 1e-9  # Allowed |Im| of the rotated Z value, relative

    # Murmuration series
    SERIES_GRID_POINTS: int = 2000
    SERIES_X_MIN: float = 2.0
    INTEGER_SNAP: float = 1e-9  # x this close to an integer is snapped to it
    JUMP_WINDOW: float = 0.5
    HISTOGRAM_SMOOTH_BINS: int = 5

    model_config = {
        "env_file": ".env",  # Load environment variables from .env file
        "extra": "ignore",  # Ignore extra environment variables not defined here
    }


# Global settings instance imported throughout the toolkit
settings = Settings()
