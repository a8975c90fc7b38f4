"""Reading and writing experiment configuration files.

A configuration file is a JSON object. Top-level keys name the experiment
(``kind``, ``seed``, ``workers``, ``samples``); everything specific to one
experiment sits under ``settings``. Keys missing from a file are filled in
from :data:`DEFAULT_CONFIG`.
"""

import copy
import json
import os
from typing import Any, Dict, Mapping

from .logger import default_logger as logger

DEFAULT_CONFIG: Dict[str, Any] = {
    "kind": "robustness",
    "seed": 0,
    "workers": 1,
    "samples": 1000,
    "settings": {},
}

CONFIG_ENV = "LOZENGE_LAB_CONFIG"
DEFAULT_CONFIG_PATH = os.environ.get(CONFIG_ENV, os.path.join("data", "experiment.json"))


def _with_defaults(data: Mapping[str, Any]) -> Dict[str, Any]:
    config = copy.deepcopy(DEFAULT_CONFIG)
    config.update(copy.deepcopy(dict(data)))
    if not isinstance(config.get("settings"), dict):
        logger.log("Ignoring non-object 'settings' entry", "warning")
        config["settings"] = {}
    return config


def load_config(path: str = DEFAULT_CONFIG_PATH) -> Dict[str, Any]:
    """Load the experiment configuration at ``path``.

    A missing, unreadable or malformed file gives a fresh copy of the
    defaults; the reason is logged.
    """
    try:
        with open(path, "r", encoding="utf-8") as fp:
            data = json.load(fp)
    except FileNotFoundError:
        logger.log(f"Configuration file not found: {path}; using defaults", "warning")
        return copy.deepcopy(DEFAULT_CONFIG)
    except json.JSONDecodeError as exc:
        logger.log(f"Invalid JSON in configuration {path} (line {exc.lineno}); using defaults",
                   "warning")
        return copy.deepcopy(DEFAULT_CONFIG)
    except OSError as exc:
        logger.log(f"Error reading configuration {path}: {exc}", "error")
        return copy.deepcopy(DEFAULT_CONFIG)
    if not isinstance(data, dict):
        logger.log(f"Configuration {path} is not a JSON object; using defaults", "warning")
        return copy.deepcopy(DEFAULT_CONFIG)
    logger.log(f"Loaded configuration from {path}", "debug")
    return _with_defaults(data)


def save_config(data: Mapping[str, Any], path: str = DEFAULT_CONFIG_PATH) -> bool:
    """Write ``data`` to ``path`` as indented, key-sorted JSON.

    Returns ``False`` (after logging) when the file cannot be written or the
    data is not JSON-serialisable.
    """
    try:
        text = json.dumps(dict(data), indent=4, sort_keys=True)
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as fp:
            fp.write(text + "\n")
    except (OSError, TypeError, ValueError) as exc:
        logger.log(f"Failed to save configuration to {path}: {exc}", "error")
        return False
    logger.log(f"Saved configuration to {path}")
    return True
