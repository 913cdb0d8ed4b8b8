"""Repositories for file persistence."""
from mortcast.repositories.base import FileRepository
from mortcast.repositories.cell import CellRepository
from mortcast.repositories.fitted import FittedModelRepository
from mortcast.repositories.forecast import ForecastRepository
from mortcast.repositories.hmd import HmdRepository
from mortcast.repositories.report import ReportRepository
from mortcast.repositories.surface import SurfaceRepository

__all__ = [
    "FileRepository",
    "CellRepository",
    "FittedModelRepository",
    "ForecastRepository",
    "HmdRepository",
    "ReportRepository",
    "SurfaceRepository",
]
