"""Persist experiment reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Tuple

from lozenge_lab.utils.logger import default_logger as logger


def _plain(value: Any) -> Any:
    """JSON-safe copy of ``value``; non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _cell(value: Any) -> Any:
    value = _plain(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return value


class OutputManager:
    """Write report data to files inside the ``output`` directory."""

    BASE_DIR = Path("output")

    def resolve(self, path: str | Path) -> Path:
        dest = Path(path)
        return dest if dest.is_absolute() else self.BASE_DIR / dest

    def save(self, data: Any, path: str | Path) -> bool:
        """Save ``data`` to ``path``.

        The format follows the extension: ``.json`` for any JSON-like object,
        ``.csv`` for a list of row dictionaries (columns in first-seen order)
        and plain text otherwise. Relative paths land under ``output/``.

        Returns:
            bool: ``True`` if the file was written, ``False`` otherwise.
        """
        dest = self.resolve(path)
        logger.log(f"Saving data to {dest}", "debug")
        try:
            dest.parent.mkdir(parents=True, exist_ok=True)
            ext = dest.suffix.lower()
            if ext == ".json":
                with dest.open("w", encoding="utf-8", newline="\n") as fp:
                    json.dump(_plain(data), fp, indent=2, sort_keys=True)
                    fp.write("\n")
            elif ext == ".csv":
                rows: List[Dict[str, Any]] = list(data)
                fields: List[str] = []
                for row in rows:
                    fields.extend(k for k in row if k not in fields)
                with dest.open("w", newline="", encoding="utf-8") as fp:
                    writer = csv.DictWriter(fp, fieldnames=fields, lineterminator="\n")
                    writer.writeheader()
                    writer.writerows({k: _cell(v) for k, v in row.items()} for row in rows)
            else:
                with dest.open("w", encoding="utf-8") as fp:
                    if isinstance(data, list):
                        fp.write("\n".join(str(item) for item in data))
                    else:
                        fp.write(str(data))
            return True
        except (OSError, TypeError, ValueError) as exc:
            logger.error(f"Failed to save data to {dest}: {exc}")
            return False


def save_report(report: Any, out: str | Path,
                manager: OutputManager | None = None) -> Tuple[Path, Path]:
    """Write ``<out>.json`` (full report) and ``<out>.csv`` (its rows).

    A trailing ``.json`` or ``.csv`` on ``out`` is dropped first.

    Raises:
        OSError: if either file could not be written.
    """
    manager = manager or OutputManager()
    base = Path(out)
    if base.suffix in (".json", ".csv"):
        base = base.with_suffix("")
    json_path = base.with_name(base.name + ".json")
    csv_path = base.with_name(base.name + ".csv")
    if not manager.save(report.to_json(), json_path) or not manager.save(report.rows, csv_path):
        raise OSError(f"Could not write report to {manager.resolve(base)}")
    logger.log(f"Report written to {manager.resolve(json_path)} and {manager.resolve(csv_path)}")
    return manager.resolve(json_path), manager.resolve(csv_path)
