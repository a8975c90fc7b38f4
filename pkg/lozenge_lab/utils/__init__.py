"""Utility helper modules for the lab."""

from .config_manager import load_config, save_config
from .file_handler import FileHandler
from .logger import get_logger, log_exception
from .rng import derive_rng, derive_seed_sequence

__all__ = [
    "load_config",
    "save_config",
    "FileHandler",
    "get_logger",
    "log_exception",
    "derive_rng",
    "derive_seed_sequence",
]
