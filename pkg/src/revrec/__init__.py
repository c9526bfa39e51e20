"""Code-reviewer recommendation for pull requests.

Ranks candidate reviewers by accumulated library/technology cosine
similarity between the incoming PR and a window of recently closed,
already-reviewed PRs; ships a retrospective evaluation harness and a
file-path-similarity baseline.
"""

from ._kernels import BACKEND as kernel_backend
from .extract import default_config
from .history import load_history, select_window
from .model import (
    ChangedFile,
    Config,
    Language,
    ProjectHistory,
    PRState,
    PullRequest,
    Recommendation,
    TokenBag,
    ground_truth,
)
from .rank import cosine_similarity, rank_reviewers, recommend, score_candidates

__version__ = "0.1.0"

__all__ = [
    "ChangedFile",
    "Config",
    "Language",
    "ProjectHistory",
    "PRState",
    "PullRequest",
    "Recommendation",
    "TokenBag",
    "cosine_similarity",
    "default_config",
    "ground_truth",
    "kernel_backend",
    "load_history",
    "rank_reviewers",
    "recommend",
    "score_candidates",
    "select_window",
]
