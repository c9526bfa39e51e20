"""Domain types shared by every other module.

All types are plain immutable dataclasses; the only behavior is
construction-time validation and `ground_truth`.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Optional, Sequence


class Language(str, Enum):
    PYTHON = "Python"
    JAVA = "Java"
    RUBY = "Ruby"
    OTHER = "Other"

    @classmethod
    def from_path(cls, path: str) -> "Language":
        lowered = path.lower()
        if lowered.endswith(".py"):
            return cls.PYTHON
        if lowered.endswith(".java"):
            return cls.JAVA
        if lowered.endswith(".rb"):
            return cls.RUBY
        return cls.OTHER


class PRState(str, Enum):
    OPEN = "OPEN"
    CLOSED = "CLOSED"


class ModelError(ValueError):
    """Raised when a domain invariant is violated at construction."""


@dataclass(frozen=True)
class ChangedFile:
    """One file touched by a pull request.

    `commit` is the commit whose tree holds the post-change content;
    None means the content lives in the working tree (new, unsubmitted PR).
    """

    path: str
    language: Language
    commit: Optional[str] = None

    def __post_init__(self):
        if not self.path:
            raise ModelError("changed file path must be non-empty")
        if self.path.startswith("/"):
            raise ModelError(f"changed file path must be relative: {self.path!r}")
        if "\\" in self.path:
            raise ModelError(f"changed file path must use forward slashes: {self.path!r}")


@dataclass(frozen=True)
class PullRequest:
    id: str
    author: str
    created_at: int
    state: PRState
    closed_at: Optional[int] = None
    commits: tuple = ()
    changed_files: tuple = ()
    referenced_reviewers: frozenset = frozenset()
    actual_reviewers: frozenset = frozenset()

    def __post_init__(self):
        if self.state is PRState.CLOSED:
            if self.closed_at is None:
                raise ModelError(f"PR {self.id}: closed PR has no closed_at")
            if self.closed_at < self.created_at:
                raise ModelError(f"PR {self.id}: closed_at precedes created_at")
        paths = [f.path for f in self.changed_files]
        if len(paths) != len(set(paths)):
            raise ModelError(f"PR {self.id}: duplicate changed-file paths")

    def ground_truth(self) -> frozenset:
        """Reviewers referenced at submission plus reviewers who actually
        reviewed, minus the author."""
        return (self.referenced_reviewers | self.actual_reviewers) - {self.author}


def ground_truth(pr: PullRequest) -> frozenset:
    return pr.ground_truth()


@dataclass(frozen=True)
class TokenBag:
    """Two disjoint multisets of extracted tokens."""

    libraries: Mapping[str, int] = field(default_factory=dict)
    technologies: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        overlap = set(self.libraries) & set(self.technologies)
        if overlap:
            raise ModelError(f"tokens classified both ways: {sorted(overlap)}")
        for name, counts in (("library", self.libraries), ("technology", self.technologies)):
            for token, count in counts.items():
                if not token:
                    raise ModelError(f"empty {name} token")
                if count < 1:
                    raise ModelError(f"{name} token {token!r} has count {count}")

    def is_empty(self) -> bool:
        return not self.libraries and not self.technologies

    def merged(self, other: "TokenBag") -> "TokenBag":
        libs = Counter(self.libraries)
        libs.update(other.libraries)
        techs = Counter(self.technologies)
        techs.update(other.technologies)
        return TokenBag(libraries=dict(libs), technologies=dict(techs))

    @classmethod
    def empty(cls) -> "TokenBag":
        return cls()


@dataclass(frozen=True)
class CandidateScore:
    reviewer: str
    lib_score: float = 0.0
    tech_score: float = 0.0
    supporting_prs: frozenset = frozenset()

    @property
    def total(self) -> float:
        return self.lib_score + self.tech_score


@dataclass(frozen=True)
class RecommendationEntry:
    reviewer: str
    total_pct: int
    lib_pct: int
    tech_pct: int


@dataclass(frozen=True)
class Recommendation:
    entries: tuple
    k: int
    generated_for: str
    config_digest: str

    def to_dict(self) -> dict:
        return {
            "generated_for": self.generated_for,
            "k": self.k,
            "config_digest": self.config_digest,
            "entries": [
                {
                    "reviewer": e.reviewer,
                    "total_pct": e.total_pct,
                    "lib_pct": e.lib_pct,
                    "tech_pct": e.tech_pct,
                }
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@dataclass
class ProjectHistory:
    """PRs in chronological order plus the repository they refer to.

    token_cache holds per-PR token bags; populate it before sharing the
    history across workers, entries are never recomputed.
    """

    prs: list
    repo_path: Optional[str] = None
    token_cache: dict = field(default_factory=dict)

    def __post_init__(self):
        ordered = sorted(self.prs, key=lambda p: (p.created_at, p.id))
        self.prs = list(ordered)

    def by_id(self, pr_id: str) -> PullRequest:
        for pr in self.prs:
            if pr.id == pr_id:
                return pr
        raise KeyError(pr_id)


@dataclass(frozen=True)
class Config:
    window_size: int = 30
    k: int = 5
    tech_lexicon: tuple = ()
    stdlib_stoplists: Mapping[str, frozenset] = field(default_factory=dict)
    languages_enabled: frozenset = frozenset({Language.PYTHON, Language.JAVA, Language.RUBY})
    fallback_enabled: bool = True
    binary_counts: bool = False
    lib_weight: float = 1.0
    tech_weight: float = 1.0

    def __post_init__(self):
        if self.window_size < 1:
            raise ModelError("window_size must be >= 1")
        if self.k < 1:
            raise ModelError("k must be >= 1")

    def digest(self) -> str:
        payload = {
            "window_size": self.window_size,
            "k": self.k,
            "tech_lexicon": sorted(self.tech_lexicon),
            "stdlib_stoplists": {
                lang: sorted(tokens) for lang, tokens in sorted(self.stdlib_stoplists.items())
            },
            "languages_enabled": sorted(l.value for l in self.languages_enabled),
            "fallback_enabled": self.fallback_enabled,
            "binary_counts": self.binary_counts,
            "lib_weight": self.lib_weight,
            "tech_weight": self.tech_weight,
        }
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]

    def replace(self, **kwargs) -> "Config":
        return replace(self, **kwargs)
