"""Runs queued sample tasks, optionally across a process pool."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Tuple

from tqdm import tqdm

from lozenge_lab.utils.logger import default_logger as logger

WORKERS_ENV = "LOZENGE_LAB_WORKERS"


def resolve_workers(workers: Optional[int] = None) -> int:
    """Return the worker count, letting ``LOZENGE_LAB_WORKERS`` override."""
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            workers = int(env)
        except ValueError:
            logger.log(f"Ignoring non-integer {WORKERS_ENV}={env!r}", "warning")
    return max(1, int(workers or 1))


class TaskScheduler:
    """In-memory queue of independent tasks.

    Results come back in insertion order whatever the worker count, so any
    reduction over them is deterministic. With more than one worker the
    callables and their arguments must be picklable.
    """

    def __init__(self, workers: Optional[int] = None, progress: bool = False,
                 label: str = "tasks") -> None:
        self.workers = resolve_workers(workers)
        self.progress = progress
        self.label = label
        self.tasks: List[
            Tuple[Callable[..., Any], Tuple[Any, ...], Dict[str, Any]]
        ] = []
        logger.log(f"TaskScheduler initialized with {self.workers} worker(s)",
                   "debug")

    def add_task(
        self, func: Callable[..., Any], *args: Any, **kwargs: Any
    ) -> int:
        """Queue ``func(*args, **kwargs)`` and return its index."""
        self.tasks.append((func, args, kwargs))
        return len(self.tasks) - 1

    def run_all(self) -> List[Any]:
        """Run every queued task and return the results in index order."""
        tasks = list(self.tasks)
        self.tasks.clear()
        logger.log(f"Running {len(tasks)} {self.label} on "
                   f"{self.workers} worker(s)", "debug")
        if self.workers == 1 or len(tasks) <= 1:
            results = [
                func(*args, **kwargs)
                for func, args, kwargs in tqdm(
                    tasks, desc=self.label, disable=not self.progress
                )
            ]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [
                    pool.submit(func, *args, **kwargs)
                    for func, args, kwargs in tasks
                ]
                results = [
                    future.result()
                    for future in tqdm(
                        futures, desc=self.label, disable=not self.progress
                    )
                ]
        logger.log(f"Completed {len(results)} {self.label}", "debug")
        return results
