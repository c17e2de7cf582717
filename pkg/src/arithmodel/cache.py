"""On-disk cache of JSON results keyed by a content hash of (command, stream, params)."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

from .serial import digest, dumps

CACHE_ENV = "ARITHMODEL_CACHE_DIR"
CACHE_VERSION = "1"

log = logging.getLogger(__name__)


def default_dir() -> Path | None:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def key(command: str, params: dict) -> str:
    return digest({"command": command, "params": params, "version": CACHE_VERSION})


class Cache:
    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root else None

    def _path(self, k: str) -> Path:
        return self.root / f"{k}.json"

    def get(self, k: str):
        """Stored document, or None when absent, corrupt or from another cache version."""
        if self.root is None:
            return None
        p = self._path(k)
        if not p.exists():
            return None
        try:
            entry = json.loads(p.read_text())
            body = entry["body"]
            ok = entry.get("version") == CACHE_VERSION and entry.get("sha256") == _sha(body)
        except (ValueError, KeyError, TypeError):
            ok = False
        if not ok:
            log.warning("cache entry %s is corrupt or stale; recomputing", p.name)
            return None
        return json.loads(body)

    def put(self, k: str, doc) -> None:
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        body = dumps(doc)
        entry = {"version": CACHE_VERSION, "sha256": _sha(body), "body": body}
        tmp = self._path(k).with_suffix(".tmp")
        tmp.write_text(json.dumps(entry, sort_keys=True))
        os.replace(tmp, self._path(k))


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
