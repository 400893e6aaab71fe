"""Persistent call cache keyed by (backend id, op, canonical request).

Entries live one per file under two-level fan-out directories. Each file
stores the response together with a checksum of its canonical JSON; a
mismatch or unreadable file counts as a miss, and the entry is rewritten
after recomputation. Writes go through a temp file and rename so readers
never observe a torn entry.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import threading
from collections import defaultdict
from pathlib import Path

from .base import Backend, BaseBackend, canonical_json, digest

log = logging.getLogger(__name__)


class CallCache:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self.corrupt = 0
        self._stats_lock = threading.Lock()
        self._key_locks: defaultdict[str, threading.Lock] = defaultdict(threading.Lock)
        self._key_locks_guard = threading.Lock()

    def key_lock(self, key: str) -> threading.Lock:
        with self._key_locks_guard:
            return self._key_locks[key]

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> dict | None:
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as handle:
                entry = json.load(handle)
            response = entry["response"]
            if entry["checksum"] != digest(response):
                raise ValueError("checksum mismatch")
            with self._stats_lock:
                self.hits += 1
            return response
        except FileNotFoundError:
            with self._stats_lock:
                self.misses += 1
            return None
        except (ValueError, KeyError, TypeError, OSError) as exc:
            log.warning("cache entry %s unreadable (%s); recomputing", path, exc)
            with self._stats_lock:
                self.misses += 1
                self.corrupt += 1
            return None

    def put(self, key: str, response: dict) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = canonical_json({"checksum": digest(response), "response": response})
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(payload)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def stats(self) -> dict[str, int]:
        with self._stats_lock:
            return {"hits": self.hits, "misses": self.misses, "corrupt": self.corrupt}


class CachedBackend(BaseBackend):
    """Wraps a backend, memoizing responses through a CallCache.

    Concurrent calls with the same key serialize on a per-key lock, so the
    inner backend computes each distinct request at most once per cold run.
    """

    def __init__(self, inner: Backend, cache: CallCache):
        super().__init__(inner.backend_id, inner.ops)
        self.inner = inner
        self.cache = cache

    def cache_key(self, op: str, request: dict) -> str:
        return digest({"backend": self.inner.backend_id, "op": op, "request": request})

    def _serve(self, op: str, request: dict) -> dict:
        key = self.cache_key(op, request)
        with self.cache.key_lock(key):
            cached = self.cache.get(key)
            if cached is not None:
                return cached
            response = self.inner.call(op, request)
            self.cache.put(key, response)
            return response

    def extent_of(self, image_ref: str) -> tuple[float, float] | None:
        probe = getattr(self.inner, "extent_of", None)
        return probe(image_ref) if probe else None


def cached(backend: Backend, cache: CallCache | str | Path) -> CachedBackend:
    if not isinstance(cache, CallCache):
        cache = CallCache(cache)
    return CachedBackend(backend, cache)
