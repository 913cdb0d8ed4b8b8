"""Application configuration and settings."""
import os
from typing import Optional


class Settings:
    """Process-wide defaults loaded from environment variables.

    Experiment files (see `mortcast.schemas.experiment`) override these per run;
    the values here only fill in what a config file leaves out.
    """

    # Application
    APP_NAME: str = "mortcast"
    LOG_LEVEL: str = os.getenv("MORTCAST_LOG_LEVEL", "INFO")

    # Paths
    DATA_DIR: Optional[str] = os.getenv("MORTCAST_DATA_DIR")
    OUTPUT_DIR: str = os.getenv("MORTCAST_OUTPUT_DIR", "./output")

    # Worker pool
    JOBS: int = int(os.getenv("MORTCAST_JOBS", "1"))

    # Simulation
    N_SIMS: int = int(os.getenv("MORTCAST_N_SIMS", "5000"))
    SEED: int = int(os.getenv("MORTCAST_SEED", "20200101"))
    GENERATOR_NAME: str = "PCG64"

    # Poisson optimizer
    MAX_ITER: int = int(os.getenv("MORTCAST_MAX_ITER", "2000"))
    TOL: float = float(os.getenv("MORTCAST_TOL", "1e-8"))
    MIN_COHORT_CELLS: int = int(os.getenv("MORTCAST_MIN_COHORT_CELLS", "5"))

    # Backtest
    HOLDOUT: int = 30
    ALPHA: float = 0.2

    # Age ranges (retiree lower age is configurable per experiment)
    START_YEAR: int = 1950
    OPEN_AGE: int = 100
    RETIREE_LOWER_AGE: int = 60
    FULL_LOWER_AGE: int = 0

    # Country abbreviations used in reports -> HMD file prefixes
    HMD_CODES: dict[str, str] = {
        "AUS": "AUS",
        "BEL": "BEL",
        "CAN": "CAN",
        "DEN": "DNK",
        "FIN": "FIN",
        "FRA": "FRATNP",
        "ITA": "ITA",
        "JPN": "JPN",
        "NET": "NLD",
        "NZ": "NZL_NP",
        "NOR": "NOR",
        "PRT": "PRT",
        "SPA": "ESP",
        "SWE": "SWE",
        "SWI": "CHE",
        "SCO": "GBR_SCO",
        "EW": "GBRTENW",
        "IRE": "IRL",
        "USA": "USA",
    }

    # Last observed year per country (first year is always START_YEAR)
    LAST_YEARS: dict[str, int] = {
        "AUS": 2014,
        "BEL": 2015,
        "CAN": 2011,
        "DEN": 2016,
        "FIN": 2015,
        "FRA": 2016,
        "ITA": 2014,
        "JPN": 2016,
        "NET": 2016,
        "NZ": 2013,
        "NOR": 2014,
        "PRT": 2015,
        "SPA": 2016,
        "SWE": 2016,
        "SWI": 2016,
        "SCO": 2016,
        "EW": 2016,
        "IRE": 2014,
        "USA": 2016,
    }

    @property
    def COUNTRIES(self) -> list[str]:
        """Default country list in report order."""
        return list(self.LAST_YEARS)


settings = Settings()
