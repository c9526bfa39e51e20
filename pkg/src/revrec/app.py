"""Shared application engine behind the CLI and the HTTP service.

Both surfaces funnel through Engine.recommend_request so they produce
identical machine-readable recommendations for identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from . import cache as cache_mod
from .evaluate import STRATEGIES
from .model import ChangedFile, Config, Language, ProjectHistory, PRState, PullRequest, Recommendation

_NEW_PR_ID = "new"
_NEW_PR_TIMESTAMP = 2**61


class RequestError(ValueError):
    """Malformed recommendation request (bad fields, unknown PR)."""


class UnknownPRError(RequestError):
    pass


def new_pr_from_files(files: Sequence[str], author: str) -> PullRequest:
    """Synthetic PR for the new-submission use case; contents are read
    from the repository working tree."""
    if not files:
        raise RequestError("at least one changed file is required")
    if not author:
        raise RequestError("author is required")
    changed = tuple(
        ChangedFile(path=path, language=Language.from_path(path)) for path in files
    )
    return PullRequest(
        id=_NEW_PR_ID,
        author=author,
        created_at=_NEW_PR_TIMESTAMP,
        state=PRState.OPEN,
        changed_files=changed,
    )


@dataclass
class Engine:
    history: ProjectHistory
    cfg: Config
    cache: cache_mod.RecommendationCache = field(
        default_factory=cache_mod.RecommendationCache
    )
    strategy: str = "correct"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise RequestError(f"unknown strategy {self.strategy!r}")
        repo = self.history.repo_path or ""
        self._repo_digest = cache_mod.repo_digest(repo) if repo else "none"
        self._head = cache_mod.head_commit(repo) if repo else "none"
        self.compute_count = 0  # fresh (non-cache) computations, for tests

    def recommend_request(
        self,
        pr_id: Optional[str] = None,
        files: Optional[Sequence[str]] = None,
        author: Optional[str] = None,
        k: Optional[int] = None,
        refresh: bool = False,
    ) -> Recommendation:
        if pr_id is None and not files:
            raise RequestError("either pr_id or changed_files with author is required")
        if pr_id is not None and files:
            raise RequestError("pr_id and changed_files are mutually exclusive")
        cfg = self.cfg if k is None else self.cfg.replace(k=k)
        if pr_id is not None:
            try:
                pr = self.history.by_id(str(pr_id))
            except KeyError:
                raise UnknownPRError(f"unknown PR id: {pr_id}")
        else:
            pr = new_pr_from_files(list(files), author or "")
        request = cache_mod.request_digest(
            {
                "pr_id": pr_id,
                "files": sorted(files) if files else None,
                "author": author,
                "strategy": self.strategy,
            }
        )
        key = cache_mod.make_key(self._repo_digest, self._head, cfg.digest(), request)
        cached = self.cache.get(key, refresh=refresh)
        if cached is not None:
            return cached
        recommendation = STRATEGIES[self.strategy](pr, self.history, cfg)
        self.compute_count += 1
        self.cache.put(key, recommendation)
        return recommendation


def render_table(recommendation: Recommendation) -> str:
    """Human-readable ranking table: reviewer, total%, library%, technology%."""
    if not recommendation.entries:
        return "no recommendation (empty candidate list)\n"
    width = max(len("Reviewer"), max(len(e.reviewer) for e in recommendation.entries))
    lines = [
        f"{'Reviewer':<{width}}  {'Total':>6}  {'Library':>8}  {'Technology':>10}"
    ]
    for e in recommendation.entries:
        lines.append(
            f"{e.reviewer:<{width}}  {e.total_pct:>5}%  {e.lib_pct:>7}%  {e.tech_pct:>9}%"
        )
    return "\n".join(lines) + "\n"
