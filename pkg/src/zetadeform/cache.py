"""Append-only result store keyed by canonical strings.

One JSON object per line: key, engine version, value text and a SHA-256 of
the three.  Lines that fail the checksum are ignored (and dropped at the
next write), so a damaged store only costs a recomputation.  Writers take an
exclusive flock on the store; readers a shared one.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

ENGINE_VERSION = "1"
CACHE_ENV = "ZETADEFORM_CACHE_DIR"
STORE_NAME = "results.jsonl"


@dataclass(frozen=True)
class CacheEntry:
    key: str
    value: str
    version: str = ENGINE_VERSION

    def checksum(self) -> str:
        payload = "\x1f".join((self.key, self.version, self.value)).encode()
        return hashlib.sha256(payload).hexdigest()

    def to_line(self) -> str:
        record = {"key": self.key, "version": self.version, "value": self.value, "sha256": self.checksum()}
        return json.dumps(record, sort_keys=True) + "\n"

    @classmethod
    def from_line(cls, line: str) -> "CacheEntry | None":
        try:
            record = json.loads(line)
            entry = cls(record["key"], record["value"], record["version"])
        except (ValueError, KeyError, TypeError):
            return None
        return entry if record.get("sha256") == entry.checksum() else None


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "zetadeform"


class ResultCache:
    def __init__(self, directory: str | os.PathLike | None = None, version: str = ENGINE_VERSION):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.version = version
        self.path = self.directory / STORE_NAME
        self.corrupt_lines = 0

    @contextmanager
    def _locked(self, mode: str, lock: int):
        self.directory.mkdir(parents=True, exist_ok=True)
        with open(self.path, mode, encoding="utf-8") as fh:
            fcntl.flock(fh, lock)
            try:
                yield fh
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def _scan(self, fh) -> tuple[dict[tuple[str, str], CacheEntry], int]:
        entries: dict[tuple[str, str], CacheEntry] = {}
        bad = 0
        for line in fh:
            if not line.strip():
                continue
            entry = CacheEntry.from_line(line)
            if entry is None:
                bad += 1
                continue
            entries[(entry.key, entry.version)] = entry
        return entries, bad

    def get(self, key: str) -> str | None:
        if not self.path.exists():
            return None
        with self._locked("r", fcntl.LOCK_SH) as fh:
            entries, bad = self._scan(fh)
        self.corrupt_lines = bad
        entry = entries.get((key, self.version))
        return entry.value if entry else None

    def put(self, key: str, value: str) -> None:
        entry = CacheEntry(key, value, self.version)
        with self._locked("a+", fcntl.LOCK_EX) as fh:
            fh.seek(0)
            entries, bad = self._scan(fh)
            if bad:
                # rewrite without the damaged lines
                entries[(key, self.version)] = entry
                fh.seek(0)
                fh.truncate()
                fh.writelines(e.to_line() for e in entries.values())
            else:
                fh.write(entry.to_line())
            fh.flush()
            os.fsync(fh.fileno())

    def get_or_compute(self, key: str, compute: Callable[[], str]) -> str:
        value = self.get(key)
        if value is None:
            value = compute()
            self.put(key, value)
        return value


class NullCache:
    """Stand-in when caching is disabled."""

    def get(self, key: str) -> None:
        return None

    def put(self, key: str, value: str) -> None:
        pass

    def get_or_compute(self, key: str, compute: Callable[[], str]) -> str:
        return compute()
