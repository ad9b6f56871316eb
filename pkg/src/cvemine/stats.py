"""Per-episode lifecycle metrics and the small numeric helpers behind them.

Durations use exact 86400-second days on UTC timestamps; no calendar
arithmetic. Metrics that need a found-commit anchor (elapsed fix time,
activity between finding and fixing) are absent for single-mention episodes
and never contribute zeros to downstream averages. Publication-to-fix keeps
its sign: a negative value is a fix committed before public disclosure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .gitlog import RepoHistory, author_key
from .mentions import FixEpisode
from .store import CveRecord

SECONDS_PER_DAY = 86400

# Below this many (x, y) pairs a correlation coefficient is reported absent.
MIN_CORRELATION_SAMPLE = 3


@dataclass(frozen=True)
class EpisodeMetrics:
    """Lifecycle numbers for one episode; None marks a defined absence."""

    cve_id: str
    elapsed_fix_days: float | None
    publication_to_fix_days: float | None
    contributors_between: int | None
    commits_between: int | None
    base_score: float | None


@dataclass(frozen=True)
class CorrelationResult:
    pair_name: str
    coefficient: float | None
    sample_size: int


def elapsed_fix_days(episode: FixEpisode) -> float | None:
    """Days between the found and fix commits; absent for single mentions."""
    if episode.found_commit is None:
        return None
    return (episode.fix_commit.timestamp - episode.found_commit.timestamp) / SECONDS_PER_DAY


def publication_to_fix_days(episode: FixEpisode, record: CveRecord | None) -> float | None:
    """Days from publication to the fix commit; negative for pre-disclosure fixes."""
    if record is None or record.published is None:
        return None
    return (episode.fix_commit.timestamp - record.published) / SECONDS_PER_DAY


def activity_between(history: RepoHistory, episode: FixEpisode) -> tuple[int, int] | None:
    """(contributors, commits) in the window after found up to and including fix.

    The window follows the history ordering, excludes the found commit, and
    includes the fix commit, so the commit count is at least 1 whenever
    present. Absent for single-mention episodes.
    """
    if episode.found_commit is None:
        return None
    index_of = {commit.hash: i for i, commit in enumerate(history.commits)}
    try:
        start = index_of[episode.found_commit.hash]
        end = index_of[episode.fix_commit.hash]
    except KeyError as exc:
        raise ValueError(f"episode commit {exc} not present in history") from None
    window = history.commits[start + 1 : end + 1]
    contributors = len({author_key(c.author) for c in window})
    return contributors, len(window)


def mean(values: Sequence[float]) -> float | None:
    """Arithmetic mean; absent for empty input."""
    if not values:
        return None
    return sum(values) / len(values)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Sample Pearson correlation coefficient.

    Absent when fewer than MIN_CORRELATION_SAMPLE pairs exist or either
    variable has zero variance (avoids meaningless +-1 on degenerate input).
    Raises ValueError on length mismatch.
    """
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < MIN_CORRELATION_SAMPLE:
        return None
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    syy = sum((y - mean_y) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def compute_metrics(
    episode: FixEpisode, history: RepoHistory, record: CveRecord | None
) -> EpisodeMetrics:
    """Evaluate every per-episode metric against one repository history."""
    activity = activity_between(history, episode)
    return EpisodeMetrics(
        cve_id=episode.cve_id,
        elapsed_fix_days=elapsed_fix_days(episode),
        publication_to_fix_days=publication_to_fix_days(episode, record),
        contributors_between=activity[0] if activity else None,
        commits_between=activity[1] if activity else None,
        base_score=record.base_score if record else None,
    )
