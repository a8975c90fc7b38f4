"""Task execution helpers."""

from .task_scheduler import TaskScheduler, resolve_workers

__all__ = ["TaskScheduler", "resolve_workers"]
