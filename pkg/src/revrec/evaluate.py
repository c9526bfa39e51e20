"""Retrospective replay evaluation, IR metrics, the file-path-similarity
baseline, and statistical comparison of strategies."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import _kernels
from .model import (
    Config,
    ProjectHistory,
    PRState,
    PullRequest,
    Recommendation,
    RecommendationEntry,
)
from .rank import _round_half_up, recommend, window_for

DEFAULT_K_VALUES = (1, 3, 5)

# Cap used when a strategy must return its full ranking for metrics.
_FULL_RANKING_K = 10**6


class MetricsError(ValueError):
    """Metric undefined for the given instances."""


class StatsError(ValueError):
    """Statistical quantity undefined (empty sample or degenerate variance)."""


@dataclass
class EvaluationReport:
    strategy: str
    per_k: Dict[int, Dict[str, float]]
    mrr: Optional[float]
    evaluated_prs: int
    skipped_prs: Dict[str, int]
    rr_samples: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "evaluated_prs": self.evaluated_prs,
            "skipped_prs": {k: self.skipped_prs[k] for k in sorted(self.skipped_prs)},
            "mrr": self.mrr,
            "per_k": {
                str(k): {
                    "top_k_accuracy": self.per_k[k]["top_k_accuracy"],
                    "mean_precision": self.per_k[k]["mean_precision"],
                    "mean_recall": self.per_k[k]["mean_recall"],
                }
                for k in sorted(self.per_k)
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_table(self) -> str:
        lines = [f"strategy: {self.strategy}"]
        lines.append(f"evaluated: {self.evaluated_prs}  skipped: {sum(self.skipped_prs.values())}")
        lines.append(f"MRR: {'n/a' if self.mrr is None else f'{self.mrr:.4f}'}")
        lines.append(f"{'K':>3}  {'top-K acc':>9}  {'precision':>9}  {'recall':>9}")
        for k in sorted(self.per_k):
            m = self.per_k[k]
            lines.append(
                f"{k:>3}  {m['top_k_accuracy']:>9.4f}  "
                f"{m['mean_precision']:>9.4f}  {m['mean_recall']:>9.4f}"
            )
        return "\n".join(lines) + "\n"


def top_k_accuracy(rankings: Sequence[Sequence[str]], truths: Sequence[set], K: int) -> float:
    """Fraction of instances whose top-K list hits at least one
    ground-truth reviewer."""
    if len(rankings) != len(truths):
        raise MetricsError("rankings and truths differ in length")
    if not rankings:
        raise MetricsError("top-K accuracy undefined on zero instances")
    hits = sum(1 for ranking, truth in zip(rankings, truths) if set(ranking[:K]) & set(truth))
    return hits / len(rankings)


def mrr(rankings: Sequence[Sequence[str]], truths: Sequence[set]) -> float:
    """Mean reciprocal rank of the first hit; 0 for instances with no hit
    anywhere in the ranking."""
    if len(rankings) != len(truths):
        raise MetricsError("rankings and truths differ in length")
    if not rankings:
        raise MetricsError("MRR undefined on zero instances")
    total = 0.0
    for ranking, truth in zip(rankings, truths):
        truth = set(truth)
        for position, reviewer in enumerate(ranking, start=1):
            if reviewer in truth:
                total += 1.0 / position
                break
    return total / len(rankings)


def mean_precision(rankings: Sequence[Sequence[str]], truths: Sequence[set], K: int) -> float:
    if len(rankings) != len(truths):
        raise MetricsError("rankings and truths differ in length")
    if not rankings:
        raise MetricsError("mean precision undefined on zero instances")
    total = 0.0
    for ranking, truth in zip(rankings, truths):
        if not truth:
            raise MetricsError("instance with empty ground truth must be skipped upstream")
        if ranking:
            total += len(set(ranking[:K]) & set(truth)) / min(K, len(ranking))
    return total / len(rankings)


def mean_recall(rankings: Sequence[Sequence[str]], truths: Sequence[set], K: int) -> float:
    if len(rankings) != len(truths):
        raise MetricsError("rankings and truths differ in length")
    if not rankings:
        raise MetricsError("mean recall undefined on zero instances")
    total = 0.0
    for ranking, truth in zip(rankings, truths):
        if not truth:
            raise MetricsError("instance with empty ground truth must be skipped upstream")
        total += len(set(ranking[:K]) & set(truth)) / len(truth)
    return total / len(rankings)


def _reciprocal_rank(ranking: Sequence[str], truth: set) -> float:
    for position, reviewer in enumerate(ranking, start=1):
        if reviewer in truth:
            return 1.0 / position
    return 0.0


Strategy = Callable[[PullRequest, ProjectHistory, Config], Recommendation]


def retrospective_evaluate(
    history: ProjectHistory,
    strategy: Strategy,
    cfg: Config,
    k_values: Sequence[int] = DEFAULT_K_VALUES,
    strategy_name: str = "strategy",
) -> EvaluationReport:
    """Replay each closed PR as if being submitted at its close time,
    recommending from only previously-closed PRs."""
    full_cfg = cfg.replace(k=_FULL_RANKING_K)
    rankings: List[List[str]] = []
    truths: List[set] = []
    skipped: Dict[str, int] = {}
    for pr in history.prs:
        if pr.state is not PRState.CLOSED:
            continue
        window = window_for(history, pr, cfg)
        if not window:
            skipped["empty_window"] = skipped.get("empty_window", 0) + 1
            continue
        truth = pr.ground_truth()
        if not truth:
            skipped["no_ground_truth"] = skipped.get("no_ground_truth", 0) + 1
            continue
        recommendation = strategy(pr, history, full_cfg)
        rankings.append([e.reviewer for e in recommendation.entries])
        truths.append(set(truth))
    if not rankings:
        return EvaluationReport(
            strategy=strategy_name,
            per_k={},
            mrr=None,
            evaluated_prs=0,
            skipped_prs=skipped,
        )
    per_k = {
        k: {
            "top_k_accuracy": top_k_accuracy(rankings, truths, k),
            "mean_precision": mean_precision(rankings, truths, k),
            "mean_recall": mean_recall(rankings, truths, k),
        }
        for k in k_values
    }
    return EvaluationReport(
        strategy=strategy_name,
        per_k=per_k,
        mrr=mrr(rankings, truths),
        evaluated_prs=len(rankings),
        skipped_prs=skipped,
        rr_samples=[_reciprocal_rank(r, t) for r, t in zip(rankings, truths)],
    )


def fps_similarity(files_a: Sequence[str], files_b: Sequence[str]) -> float:
    """Mean common-leading-component ratio over all cross pairs of paths."""
    split_a = [tuple(p.split("/")) for p in files_a]
    split_b = [tuple(p.split("/")) for p in files_b]
    return _kernels.fps_mean(split_a, split_b)


def _rank_single_dimension(
    totals: Mapping[str, float],
    supporting: Mapping[str, set],
    requester: str,
    window: Sequence[PullRequest],
    cfg: Config,
    generated_for: str,
) -> Recommendation:
    """rank_reviewers analog for one-dimensional scores: same exclusion,
    tie-break, truncation, normalization, and fallback rules."""
    from .rank import _frequency_entries

    closed_by_id = {pr.id: (pr.closed_at or 0) for pr in window}
    candidates = [r for r, total in totals.items() if r != requester and total > 0]
    if candidates:

        def recency(reviewer: str) -> int:
            return max((closed_by_id.get(i, 0) for i in supporting.get(reviewer, ())), default=0)

        candidates.sort(key=lambda r: (-totals[r], -recency(r), r))
        ranked = candidates[: cfg.k]
        max_total = max(totals[r] for r in ranked)
        entries = tuple(
            RecommendationEntry(r, _round_half_up(totals[r] / max_total * 100.0), 0, 0)
            for r in ranked
        )
    elif cfg.fallback_enabled:
        entries = _frequency_entries(requester, window, cfg)
    else:
        entries = ()
    return Recommendation(
        entries=entries, k=cfg.k, generated_for=generated_for, config_digest=cfg.digest()
    )


def fps_recommend(pr: PullRequest, history: ProjectHistory, cfg: Config) -> Recommendation:
    """File-path-similarity baseline: same pipeline as `recommend` with
    path overlap as the single similarity dimension."""
    window = window_for(history, pr, cfg)
    current_paths = [cf.path for cf in pr.changed_files]
    totals: Dict[str, float] = {}
    supporting: Dict[str, set] = {}
    for past in window:
        sim = fps_similarity(current_paths, [cf.path for cf in past.changed_files])
        for reviewer in past.ground_truth():
            totals[reviewer] = totals.get(reviewer, 0.0) + sim
            if sim > 0:
                supporting.setdefault(reviewer, set()).add(past.id)
    return _rank_single_dimension(totals, supporting, pr.author, window, cfg, pr.id)


def frequency_recommend(pr: PullRequest, history: ProjectHistory, cfg: Config) -> Recommendation:
    """Rank window reviewers purely by how many window PRs they reviewed."""
    window = window_for(history, pr, cfg)
    return _rank_single_dimension({}, {}, pr.author, window, cfg.replace(fallback_enabled=True), pr.id)


STRATEGIES: Dict[str, Strategy] = {
    "correct": recommend,
    "fps": fps_recommend,
    "frequency": frequency_recommend,
}


def _midranks(values: Sequence[float]) -> List[float]:
    """Fractional ranks of `values` within their own sorted order."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for pos in range(i, j + 1):
            ranks[order[pos]] = rank
        i = j + 1
    return ranks


def _u_statistic(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    u = 0.0
    for a in sample_a:
        for b in sample_b:
            if a > b:
                u += 1.0
            elif a == b:
                u += 0.5
    return u


def _exact_u_p(sample_a: Sequence[float], sample_b: Sequence[float], u_obs: float) -> float:
    """Exact two-sided tail of U over all group assignments of the pooled
    values, via a subset-sum distribution over doubled midranks."""
    n, m = len(sample_a), len(sample_b)
    pooled = list(sample_a) + list(sample_b)
    doubled = [int(round(2 * r)) for r in _midranks(pooled)]
    max_sum = sum(sorted(doubled)[-n:])
    # counts[k][s] = number of k-subsets of the pooled ranks with doubled sum s
    counts = [[0] * (max_sum + 1) for _ in range(n + 1)]
    counts[0][0] = 1
    for value in doubled:
        for k in range(n, 0, -1):
            row, prev = counts[k], counts[k - 1]
            for s in range(max_sum, value - 1, -1):
                if prev[s - value]:
                    row[s] += prev[s - value]
    # A doubled rank sum s corresponds to 2U = s - n(n+1).
    threshold = abs(int(round(2 * u_obs)) - n * m)
    tail = 0
    total = 0
    for s, count in enumerate(counts[n]):
        if not count:
            continue
        total += count
        two_u = s - n * (n + 1)
        if abs(two_u - n * m) >= threshold:
            tail += count
    return tail / total


def mann_whitney_u(
    sample_a: Sequence[float], sample_b: Sequence[float]
) -> Tuple[float, float]:
    """Mann-Whitney U for sample_a with a two-sided p-value.

    Exact tail for small problems (n*m <= 400), tie-corrected normal
    approximation otherwise.
    """
    if not sample_a or not sample_b:
        raise StatsError("mann_whitney_u requires non-empty samples")
    n, m = len(sample_a), len(sample_b)
    u = _u_statistic(sample_a, sample_b)
    if n * m <= 400:
        return u, _exact_u_p(sample_a, sample_b, u)
    pooled = list(sample_a) + list(sample_b)
    total = n + m
    tie_sizes: Dict[float, int] = {}
    for value in pooled:
        tie_sizes[value] = tie_sizes.get(value, 0) + 1
    tie_term = sum(t**3 - t for t in tie_sizes.values())
    variance = n * m / 12.0 * ((total + 1) - tie_term / (total * (total - 1)))
    if variance <= 0:
        return u, 1.0
    z = (u - n * m / 2.0) / math.sqrt(variance)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return u, min(1.0, p)


def cohens_d(a: Sequence[float], b: Sequence[float]) -> float:
    """Mean difference over the pooled (n-1 denominator) standard deviation."""
    if len(a) < 2 or len(b) < 2:
        raise StatsError("cohens_d requires at least two values per sample")
    mean_a, mean_b = _mean(a), _mean(b)
    var_a, var_b = _sample_var(a), _sample_var(b)
    pooled = ((len(a) - 1) * var_a + (len(b) - 1) * var_b) / (len(a) + len(b) - 2)
    if pooled == 0:
        raise StatsError("degenerate variance")
    return (mean_a - mean_b) / math.sqrt(pooled)


def glass_delta(a: Sequence[float], b: Sequence[float]) -> float:
    """Mean difference over the control sample's standard deviation."""
    if not a or len(b) < 2:
        raise StatsError("glass_delta requires samples (control of size >= 2)")
    var_b = _sample_var(b)
    if var_b == 0:
        raise StatsError("degenerate variance")
    return (_mean(a) - _mean(b)) / math.sqrt(var_b)


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _sample_var(values: Sequence[float]) -> float:
    mu = _mean(values)
    return sum((v - mu) ** 2 for v in values) / (len(values) - 1)


def compare_strategies(rr_a: Sequence[float], rr_b: Sequence[float]) -> dict:
    """MWU and effect sizes over two strategies' per-PR reciprocal ranks."""
    u, p = mann_whitney_u(rr_a, rr_b)
    result = {"mwu_u": u, "mwu_p": p}
    try:
        result["cohens_d"] = cohens_d(rr_a, rr_b)
    except StatsError as exc:
        result["cohens_d_error"] = str(exc)
    try:
        result["glass_delta"] = glass_delta(rr_a, rr_b)
    except StatsError as exc:
        result["glass_delta_error"] = str(exc)
    return result
