"""Bounded in-process recommendation cache with optional disk persistence.

Keys bind a recommendation to the exact repository state, configuration,
and request it was computed for; any mismatch is a miss.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from collections import OrderedDict
from typing import Optional

from .model import Recommendation, RecommendationEntry

log = logging.getLogger(__name__)

DEFAULT_CAPACITY = 64


def request_digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def make_key(repo_digest: str, head_commit: str, config_digest: str, request: str) -> tuple:
    return (repo_digest, head_commit, config_digest, request)


class RecommendationCache:
    """Most-recently-used bounded map; thread-safe."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY, persist_dir: Optional[str] = None):
        self.capacity = capacity
        self.persist_dir = persist_dir
        self._entries: "OrderedDict[tuple, Recommendation]" = OrderedDict()
        self._lock = threading.Lock()
        if persist_dir:
            os.makedirs(persist_dir, exist_ok=True)

    def get(self, key: tuple, refresh: bool = False) -> Optional[Recommendation]:
        """Stored Recommendation on exact key match; `refresh` bypasses and
        invalidates the entry (forcing the caller to recompute)."""
        with self._lock:
            if refresh:
                self._entries.pop(key, None)
                self._remove_persisted(key)
                return None
            if key in self._entries:
                self._entries.move_to_end(key)
                return self._entries[key]
        return self._load_persisted(key)

    def put(self, key: tuple, recommendation: Recommendation) -> None:
        with self._lock:
            self._entries[key] = recommendation
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                evicted, _ = self._entries.popitem(last=False)
                self._remove_persisted(evicted)
            if self.persist_dir:
                self._write_persisted(key, recommendation)

    def _path(self, key: tuple) -> str:
        digest = hashlib.sha256("/".join(key).encode("utf-8")).hexdigest()[:32]
        return os.path.join(self.persist_dir, f"{digest}.json")

    def _write_persisted(self, key: tuple, recommendation: Recommendation) -> None:
        try:
            with open(self._path(key), "w", encoding="utf-8") as fh:
                json.dump({"key": list(key), "recommendation": recommendation.to_dict()}, fh)
        except OSError as exc:
            log.warning("cache persistence failed: %s", exc)

    def _remove_persisted(self, key: tuple) -> None:
        if not self.persist_dir:
            return
        try:
            os.remove(self._path(key))
        except OSError:
            pass

    def _load_persisted(self, key: tuple) -> Optional[Recommendation]:
        if not self.persist_dir:
            return None
        path = self._path(key)
        if not os.path.isfile(path):
            return None
        try:
            with open(path, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
            if payload.get("key") != list(key):
                return None
            data = payload["recommendation"]
            recommendation = Recommendation(
                entries=tuple(
                    RecommendationEntry(
                        e["reviewer"], e["total_pct"], e["lib_pct"], e["tech_pct"]
                    )
                    for e in data["entries"]
                ),
                k=data["k"],
                generated_for=data["generated_for"],
                config_digest=data["config_digest"],
            )
        except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            log.warning("corrupt cache entry %s treated as miss: %s", path, exc)
            return None
        with self._lock:
            self._entries[key] = recommendation
            self._entries.move_to_end(key)
        return recommendation


def repo_digest(repo_path: str) -> str:
    return hashlib.sha256(os.path.abspath(repo_path).encode("utf-8")).hexdigest()[:16]


def head_commit(repo_path: str) -> str:
    """Current HEAD commit id, or 'worktree' when unresolvable."""
    git_dir = os.path.join(repo_path, ".git")
    if not os.path.isdir(git_dir):
        git_dir = repo_path
    head_file = os.path.join(git_dir, "HEAD")
    try:
        with open(head_file, "r", encoding="utf-8") as fh:
            head = fh.read().strip()
        if head.startswith("ref: "):
            ref_path = os.path.join(git_dir, head[5:])
            if os.path.isfile(ref_path):
                with open(ref_path, "r", encoding="utf-8") as fh:
                    return fh.read().strip()
            packed = os.path.join(git_dir, "packed-refs")
            if os.path.isfile(packed):
                with open(packed, "r", encoding="utf-8") as fh:
                    for line in fh:
                        if line.strip().endswith(head[5:]):
                            return line.split()[0]
            return "worktree"
        return head
    except OSError:
        return "worktree"
