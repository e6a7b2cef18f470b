"""Utilities Module"""

from .data_processing import DataProcessor, ReportGenerator
from .config_io import RunConfig, parse_config, parse_model, load_config, load_model, load_run_defaults

__all__ = [
    "DataProcessor",
    "ReportGenerator",
    "RunConfig",
    "parse_config",
    "parse_model",
    "load_config",
    "load_model",
    "load_run_defaults",
]
