"""Report persistence."""

from .output_manager import OutputManager, save_report

__all__ = ["OutputManager", "save_report"]
