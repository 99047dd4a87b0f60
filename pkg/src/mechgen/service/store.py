"""File-per-record persistence with atomic replace-on-write.

Records live under ``<root>/<kind>/<id>.json``.  Writes go through a
temporary file and ``os.replace`` so a reader (or a crash) never sees a
half-written record; corrupt files are skipped with a warning on load
instead of failing startup.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import uuid
from pathlib import Path

logger = logging.getLogger(__name__)


def new_id() -> str:
    return uuid.uuid4().hex[:12]


class FileStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _dir(self, kind: str) -> Path:
        d = self.root / kind
        d.mkdir(parents=True, exist_ok=True)
        return d

    def path(self, kind: str, record_id: str) -> Path:
        return self._dir(kind) / f"{record_id}.json"

    def save(self, kind: str, record_id: str, payload: dict) -> None:
        target = self.path(kind, record_id)
        fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, sort_keys=True, indent=2)
                fh.write("\n")
            os.replace(tmp, target)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def load(self, kind: str, record_id: str) -> dict | None:
        target = self.path(kind, record_id)
        if not target.exists():
            return None
        with open(target, encoding="utf-8") as fh:
            return json.load(fh)

    def load_all(self, kind: str) -> dict[str, dict]:
        out: dict[str, dict] = {}
        for path in sorted(self._dir(kind).glob("*.json")):
            try:
                with open(path, encoding="utf-8") as fh:
                    out[path.stem] = json.load(fh)
            except (OSError, json.JSONDecodeError) as e:
                logger.warning("skipping corrupt record %s: %s", path, e)
        return out

    def delete(self, kind: str, record_id: str) -> None:
        try:
            self.path(kind, record_id).unlink()
        except FileNotFoundError:
            pass
