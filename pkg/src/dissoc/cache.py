"""Content-addressed cache for expensive command results.

Entries are JSON files named by the sha256 of (package version, command,
parameters).  The directory comes from DISSOC_CACHE_DIR, defaulting to
~/.cache/dissoc.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from . import __version__


def cache_dir() -> Path:
    return Path(os.environ.get("DISSOC_CACHE_DIR") or Path.home() / ".cache" / "dissoc")


def cache_key(command: str, params: dict) -> str:
    blob = json.dumps({"version": __version__, "command": command, "params": params},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def load(command: str, params: dict):
    path = cache_dir() / f"{cache_key(command, params)}.json"
    try:
        return json.loads(path.read_text())
    except (OSError, ValueError):
        return None


def store(command: str, params: dict, payload) -> None:
    d = cache_dir()
    try:
        d.mkdir(parents=True, exist_ok=True)
        path = d / f"{cache_key(command, params)}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload))
        tmp.replace(path)
    except OSError:
        pass            # a read-only cache only costs recomputation


def cached(command: str, params: dict, compute, use_cache: bool = True):
    """Return compute() through the cache; the payload must be JSON-serializable."""
    if use_cache:
        hit = load(command, params)
        if hit is not None:
            return hit
    payload = json.loads(json.dumps(compute()))
    if use_cache:
        store(command, params, payload)
    return payload
