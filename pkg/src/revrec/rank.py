"""Similarity scoring, score propagation, and ranked recommendation.

Past reviewers inherit the library/technology cosine similarity of every
window PR they reviewed; the accumulated totals drive the ranking.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import _kernels
from .extract import build_project_module_index, tokenbag_of_pr
from .history import make_file_reader, select_window
from .model import (
    CandidateScore,
    Config,
    ProjectHistory,
    PRState,
    PullRequest,
    Recommendation,
    RecommendationEntry,
    TokenBag,
)

log = logging.getLogger(__name__)

_FAR_FUTURE = 2**62


def cosine_similarity(a: Mapping[str, int], b: Mapping[str, int]) -> float:
    """Cosine over the union vocabulary with counts as coordinates;
    0 when either multiset is empty."""
    if not isinstance(a, dict):
        a = dict(a)
    if not isinstance(b, dict):
        b = dict(b)
    return _kernels.cosine(a, b)


def score_candidates(
    current: TokenBag,
    window: Sequence[Tuple[PullRequest, TokenBag]],
    lib_weight: float = 1.0,
    tech_weight: float = 1.0,
) -> Dict[str, CandidateScore]:
    """Propagate per-PR similarities to that PR's ground-truth reviewers."""
    lib_scores: Dict[str, float] = {}
    tech_scores: Dict[str, float] = {}
    supporting: Dict[str, set] = {}
    for past, bag in window:
        sim_lib = lib_weight * cosine_similarity(current.libraries, bag.libraries)
        sim_tech = tech_weight * cosine_similarity(current.technologies, bag.technologies)
        for reviewer in past.ground_truth():
            lib_scores[reviewer] = lib_scores.get(reviewer, 0.0) + sim_lib
            tech_scores[reviewer] = tech_scores.get(reviewer, 0.0) + sim_tech
            if sim_lib + sim_tech > 0:
                supporting.setdefault(reviewer, set()).add(past.id)
    return {
        reviewer: CandidateScore(
            reviewer=reviewer,
            lib_score=lib_scores[reviewer],
            tech_score=tech_scores[reviewer],
            supporting_prs=frozenset(supporting.get(reviewer, ())),
        )
        for reviewer in lib_scores
    }


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def normalize_scores(
    entries: Sequence[CandidateScore],
) -> List[Tuple[int, int, int]]:
    """Scale each dimension so its maximum maps to 100 (half-up integer
    percentages); an all-zero dimension maps to 0 everywhere."""
    max_total = max((e.total for e in entries), default=0.0)
    max_lib = max((e.lib_score for e in entries), default=0.0)
    max_tech = max((e.tech_score for e in entries), default=0.0)

    def pct(value: float, maximum: float) -> int:
        return _round_half_up(value / maximum * 100.0) if maximum > 0 else 0

    return [
        (pct(e.total, max_total), pct(e.lib_score, max_lib), pct(e.tech_score, max_tech))
        for e in entries
    ]


def _recency(candidate: CandidateScore, closed_by_id: Mapping[str, int]) -> int:
    return max((closed_by_id.get(pr_id, 0) for pr_id in candidate.supporting_prs), default=0)


def rank_reviewers(
    scores: Mapping[str, CandidateScore],
    requester: str,
    history_window: Sequence[PullRequest],
    cfg: Config,
    generated_for: str = "",
) -> Recommendation:
    """Rank candidates by total score; fall back to window review frequency
    when no candidate carries any signal."""
    closed_by_id = {pr.id: (pr.closed_at or 0) for pr in history_window}
    candidates = [
        score
        for reviewer, score in scores.items()
        if reviewer != requester and score.total > 0
    ]
    if candidates:
        candidates.sort(key=lambda c: (-c.total, -_recency(c, closed_by_id), c.reviewer))
        ranked = candidates[: cfg.k]
        pcts = normalize_scores(ranked)
        entries = tuple(
            RecommendationEntry(c.reviewer, total_pct, lib_pct, tech_pct)
            for c, (total_pct, lib_pct, tech_pct) in zip(ranked, pcts)
        )
    elif cfg.fallback_enabled:
        entries = _frequency_entries(requester, history_window, cfg)
    else:
        entries = ()
    return Recommendation(
        entries=entries,
        k=cfg.k,
        generated_for=generated_for,
        config_digest=cfg.digest(),
    )


def _frequency_entries(
    requester: str, history_window: Sequence[PullRequest], cfg: Config
) -> tuple:
    counts: Dict[str, int] = {}
    latest: Dict[str, int] = {}
    for pr in history_window:
        for reviewer in pr.ground_truth():
            if reviewer == requester:
                continue
            counts[reviewer] = counts.get(reviewer, 0) + 1
            latest[reviewer] = max(latest.get(reviewer, 0), pr.closed_at or 0)
    ordered = sorted(counts, key=lambda r: (-counts[r], -latest[r], r))
    return tuple(RecommendationEntry(r, 0, 0, 0) for r in ordered[: cfg.k])


def reference_time(pr: PullRequest) -> int:
    """Replay instant for a PR: its close time when closed, otherwise
    the far future (every closed PR is eligible history)."""
    if pr.state is PRState.CLOSED and pr.closed_at is not None:
        return pr.closed_at
    return _FAR_FUTURE


def window_for(history: ProjectHistory, pr: PullRequest, cfg: Config) -> List[PullRequest]:
    window = select_window(history, reference_time(pr), cfg.window_size)
    return [past for past in window if past.id != pr.id]


def bag_for(
    pr: PullRequest,
    history: ProjectHistory,
    index,
    cfg: Config,
) -> TokenBag:
    """Token bag for a PR, via the history's cache. Cached entries are
    treated as immutable."""
    cached = history.token_cache.get(pr.id)
    if cached is not None:
        return cached
    if history.repo_path is None:
        raise ValueError(f"no repository to extract PR {pr.id} from")
    bag, warnings = tokenbag_of_pr(pr, make_file_reader(history.repo_path), index, cfg)
    for warning in warnings:
        log.warning("extraction: %s", warning)
    history.token_cache[pr.id] = bag
    return bag


def recommend(
    pr: PullRequest,
    history: ProjectHistory,
    cfg: Config,
    max_workers: Optional[int] = None,
) -> Recommendation:
    """Full pipeline: window selection, token extraction, score
    propagation, ranking. Deterministic for fixed inputs and Config."""
    window = window_for(history, pr, cfg)
    index = _index_for(history)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            bags = list(pool.map(lambda p: bag_for(p, history, index, cfg), window))
    else:
        bags = [bag_for(past, history, index, cfg) for past in window]
    current = bag_for(pr, history, index, cfg)
    scores = score_candidates(
        current, list(zip(window, bags)), cfg.lib_weight, cfg.tech_weight
    )
    return rank_reviewers(scores, pr.author, window, cfg, generated_for=pr.id)


def _index_for(history: ProjectHistory):
    index = getattr(history, "_module_index", None)
    if index is None:
        if history.repo_path is not None:
            index = build_project_module_index(history.repo_path)
        else:
            from .extract import ProjectModuleIndex

            index = ProjectModuleIndex(top_level_modules=frozenset())
        history._module_index = index
    return index
