"""Append-only JSON-lines cache of point counts.

Each line is {"key", "count", "ts", "version", "sha"} where sha is the
SHA-256 of the canonical JSON of (key, count, version).  A line whose
checksum does not match raises CacheCorruption; two lines with the same key
and different counts raise CacheDivergence.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
import time
from pathlib import Path

from .errors import CacheCorruption, CacheDivergence

CACHE_ENV = "HGK3_CACHE"
CODE_VERSION = "1"


def _checksum(key: str, count: int, version: str) -> str:
    body = json.dumps([key, count, version], separators=(",", ":"))
    return hashlib.sha256(body.encode()).hexdigest()


class CountCache:
    def __init__(self, path):
        self.path = Path(path)
        self.entries: dict[str, int] = {}
        self.hits = 0
        self.writes = 0
        if self.path.exists():
            self._load()

    @classmethod
    def from_env(cls, path=None) -> "CountCache | None":
        path = path or os.environ.get(CACHE_ENV)
        return cls(path) if path else None

    def _load(self):
        with open(self.path) as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    key, count, version, sha = rec["key"], rec["count"], rec["version"], rec["sha"]
                except (ValueError, KeyError, TypeError) as exc:
                    raise CacheCorruption(f"{self.path}:{lineno}: unreadable record ({exc})") from None
                if _checksum(key, count, version) != sha:
                    raise CacheCorruption(f"{self.path}:{lineno}: checksum mismatch")
                self._admit(key, count, f"{self.path}:{lineno}")

    def _admit(self, key: str, count: int, where: str):
        old = self.entries.get(key)
        if old is not None and old != count:
            raise CacheDivergence(f"{where}: key {key} has counts {old} and {count}")
        self.entries[key] = count

    def get(self, key: str) -> int | None:
        n = self.entries.get(key)
        if n is not None:
            self.hits += 1
        return n

    def put(self, key: str, count: int) -> None:
        if self.entries.get(key) == count:
            return
        self._admit(key, count, "new record")
        rec = {
            "key": key,
            "count": count,
            "ts": time.time(),
            "version": CODE_VERSION,
            "sha": _checksum(key, count, CODE_VERSION),
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)
        self.writes += 1

    def __len__(self):
        return len(self.entries)
