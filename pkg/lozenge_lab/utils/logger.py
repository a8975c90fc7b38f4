"""Logging utilities used across the lab."""

from __future__ import annotations

import logging
import os
from pathlib import Path

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE = Path(os.environ.get("LOZENGE_LAB_LOG", "data/logs/lozenge_lab.log"))


class Logger:
    """Wrapper around :mod:`logging` with the lab's handler setup."""

    def __init__(
        self, name: str = "lozenge_lab", log_file: str | Path = LOG_FILE
    ) -> None:
        """Configure a logger instance.

        Args:
            name: Name of the logger to create.
            log_file: Path to the log file. Its directory is created on demand.
        """
        self._logger = logging.getLogger(name)
        if not self._logger.handlers:
            self._logger.setLevel(logging.INFO)
            formatter = logging.Formatter(LOG_FORMAT)
            stream_handler = logging.StreamHandler()
            stream_handler.setFormatter(formatter)
            self._logger.addHandler(stream_handler)
            try:
                path = Path(log_file)
                path.parent.mkdir(parents=True, exist_ok=True)
                file_handler = logging.FileHandler(path)
            except OSError as exc:
                self._logger.warning(f"File logging disabled: {exc}")
            else:
                file_handler.setFormatter(formatter)
                self._logger.addHandler(file_handler)

    @property
    def name(self) -> str:
        return self._logger.name

    def set_level(self, level: int) -> None:
        self._logger.setLevel(level)

    def debug(self, message: str) -> None:
        """Log a debug ``message``."""
        self._logger.debug(message)

    def info(self, message: str) -> None:
        """Log an informational ``message``."""
        self._logger.info(message)

    def warning(self, message: str) -> None:
        """Log a warning ``message``."""
        self._logger.warning(message)

    def error(self, message: str) -> None:
        """Log an error ``message``."""
        self._logger.error(message)

    def log(self, message: str, level: str = "info") -> None:
        """Log a message at the specified level.

        Args:
            message: The message to log.
            level: The logging level (debug, info, warning, error, critical).
        """
        level_map = {
            "debug": self._logger.debug,
            "info": self._logger.info,
            "warning": self._logger.warning,
            "error": self._logger.error,
            "critical": self._logger.critical,
        }

        log_func = level_map.get(level.lower(), self._logger.info)
        log_func(message)


# Default logger used across the package
default_logger = Logger()


def get_logger(name: str | None = None) -> logging.Logger:
    """Return a child of the package logger."""
    if not name:
        return logging.getLogger("lozenge_lab")
    if name.startswith("lozenge_lab"):
        return logging.getLogger(name)
    return logging.getLogger(f"lozenge_lab.{name}")


def log_exception(logger: logging.Logger | Logger, message: str,
                  exc: Exception) -> None:
    """Log ``exc`` together with the context ``message``."""
    logger.error(message)
    logger.error(f"{type(exc).__name__}: {exc}")
