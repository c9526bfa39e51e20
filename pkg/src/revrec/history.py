"""PR metadata loading, repository file access, and window selection.

The PR metadata file is newline-delimited JSON, one record per PR.
Repository contents are read straight from the local git object store
(loose objects), with `git cat-file` as a fallback for packed objects.
"""

from __future__ import annotations

import json
import os
import subprocess
import zlib
from typing import List, Optional

from .extract import FileReadError
from .model import (
    ChangedFile,
    Language,
    ModelError,
    ProjectHistory,
    PRState,
    PullRequest,
)


class HistoryError(Exception):
    """Metadata file or repository could not be loaded."""


def _git_dir(repo_path: str) -> str:
    candidate = os.path.join(repo_path, ".git")
    if os.path.isdir(candidate):
        return candidate
    if os.path.isdir(os.path.join(repo_path, "objects")):
        return repo_path  # bare repository
    raise HistoryError(f"repository snapshot unavailable: {repo_path}")


def _read_object(repo_path: str, sha: str) -> tuple:
    """Return (type, payload) for a git object, trying loose storage first."""
    git_dir = _git_dir(repo_path)
    loose = os.path.join(git_dir, "objects", sha[:2], sha[2:])
    if os.path.isfile(loose):
        with open(loose, "rb") as fh:
            raw = zlib.decompress(fh.read())
        header, _, payload = raw.partition(b"\x00")
        return header.split(b" ")[0].decode(), payload
    result = subprocess.run(
        ["git", "--git-dir", git_dir, "cat-file", "-t", sha],
        capture_output=True,
        text=True,
    )
    if result.returncode != 0:
        raise FileReadError(f"unknown object {sha}")
    obj_type = result.stdout.strip()
    blob = subprocess.run(
        ["git", "--git-dir", git_dir, "cat-file", obj_type, sha],
        capture_output=True,
    )
    if blob.returncode != 0:
        raise FileReadError(f"unreadable object {sha}")
    return obj_type, blob.stdout


def _tree_of_commit(repo_path: str, commit_id: str) -> str:
    obj_type, payload = _read_object(repo_path, commit_id)
    if obj_type != "commit":
        raise FileReadError(f"{commit_id} is a {obj_type}, not a commit")
    first = payload.split(b"\n", 1)[0]
    if not first.startswith(b"tree "):
        raise FileReadError(f"malformed commit object {commit_id}")
    return first[5:].decode()


def _tree_lookup(repo_path: str, tree_sha: str, name: str) -> Optional[tuple]:
    """Find `name` in a tree object; returns (sha, is_tree) or None."""
    obj_type, payload = _read_object(repo_path, tree_sha)
    if obj_type != "tree":
        raise FileReadError(f"{tree_sha} is not a tree")
    pos = 0
    while pos < len(payload):
        space = payload.index(b" ", pos)
        nul = payload.index(b"\x00", space)
        mode = payload[pos:space]
        entry_name = payload[space + 1 : nul].decode("utf-8", errors="replace")
        sha = payload[nul + 1 : nul + 21].hex()
        pos = nul + 21
        if entry_name == name:
            return sha, mode == b"40000"
    return None


def read_file_at(repo_path: str, commit_id: str, path: str) -> str:
    """File content as recorded at a commit (post-change side)."""
    tree = _tree_of_commit(repo_path, commit_id)
    for component in path.split("/"):
        entry = _tree_lookup(repo_path, tree, component)
        if entry is None:
            raise FileReadError(f"{path} not in commit {commit_id}")
        tree, _ = entry
    obj_type, payload = _read_object(repo_path, tree)
    if obj_type != "blob":
        raise FileReadError(f"{path} at {commit_id} is not a file")
    try:
        return payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FileReadError(f"{path} at {commit_id} is not valid UTF-8") from exc


def read_worktree_file(repo_path: str, path: str) -> str:
    full = os.path.join(repo_path, path)
    try:
        with open(full, "r", encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise FileReadError(f"cannot read {path}: {exc}") from exc


def make_file_reader(repo_path: str):
    """Resolve a ChangedFile to source text; commit-less files come from
    the working tree (new, unsubmitted PR)."""

    def reader(cf: ChangedFile) -> str:
        if cf.commit is None:
            return read_worktree_file(repo_path, cf.path)
        return read_file_at(repo_path, cf.commit, cf.path)

    return reader


def _parse_changed_file(record: dict, index: int) -> ChangedFile:
    path = record.get("path")
    if not isinstance(path, str) or not path:
        raise HistoryError(f"record {index}: changed_files entry missing 'path'")
    language = record.get("language")
    if language is None:
        lang = Language.from_path(path)
    else:
        try:
            lang = Language(language)
        except ValueError:
            raise HistoryError(f"record {index}: unknown language {language!r}")
    return ChangedFile(path=path, language=lang, commit=record.get("commit"))


_REQUIRED_FIELDS = ("id", "author", "created_at", "state")


def parse_pr_record(record: dict, index: int) -> PullRequest:
    for name in _REQUIRED_FIELDS:
        if name not in record:
            raise HistoryError(f"record {index}: missing field '{name}'")
    try:
        state = PRState(record["state"])
    except ValueError:
        raise HistoryError(f"record {index}: bad field 'state': {record['state']!r}")
    try:
        return PullRequest(
            id=str(record["id"]),
            author=record["author"],
            created_at=int(record["created_at"]),
            closed_at=None if record.get("closed_at") is None else int(record["closed_at"]),
            state=state,
            commits=tuple(record.get("commits", ())),
            changed_files=tuple(
                _parse_changed_file(cf, index) for cf in record.get("changed_files", ())
            ),
            referenced_reviewers=frozenset(record.get("referenced_reviewers", ())),
            actual_reviewers=frozenset(record.get("actual_reviewers", ())),
        )
    except ModelError as exc:
        raise HistoryError(f"record {index}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise HistoryError(f"record {index}: malformed value: {exc}") from exc


def load_history(metadata_path: str, repo_path: Optional[str] = None) -> ProjectHistory:
    """Load a newline-delimited PR metadata file into a ProjectHistory."""
    if not os.path.isfile(metadata_path):
        raise HistoryError(f"metadata file not found: {metadata_path}")
    if repo_path is not None:
        _git_dir(repo_path)
    prs: List[PullRequest] = []
    seen = set()
    with open(metadata_path, "r", encoding="utf-8") as fh:
        for index, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise HistoryError(f"record {index}: invalid JSON: {exc}") from exc
            pr = parse_pr_record(record, index)
            if pr.id in seen:
                raise HistoryError(f"record {index}: duplicate PR id {pr.id}")
            seen.add(pr.id)
            prs.append(pr)
    return ProjectHistory(prs=prs, repo_path=repo_path)


def select_window(history: ProjectHistory, reference: int, w: int) -> List[PullRequest]:
    """The up-to-w CLOSED PRs closed strictly before `reference`,
    most recent first."""
    if w < 1:
        raise ValueError("window size must be >= 1")
    eligible = [
        pr
        for pr in history.prs
        if pr.state is PRState.CLOSED and pr.closed_at is not None and pr.closed_at < reference
    ]
    # most recent first; id descending on closed_at ties
    eligible.sort(key=lambda pr: pr.id, reverse=True)
    eligible.sort(key=lambda pr: pr.closed_at, reverse=True)
    return eligible[:w]
