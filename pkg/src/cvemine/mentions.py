"""CVE mention detection in commit messages and fix-episode derivation.

Matching is context-free: any commit message containing an identifier counts
as a mention, merge commits included. A CVE mentioned once is assumed fixed by
that commit; with several mentions the first marks where the CVE was found and
the last marks the fix, with churn totalled across every mention commit.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .gitlog import CommitRecord, RepoHistory

# An id embedded in a longer ASCII alphanumeric run (XCVE-2020-0001,
# CVE-2020-12345678) is not a mention; punctuation on either side is fine.
MENTION_RE = re.compile(
    r"(?<![0-9A-Za-z])CVE-\d{4}-\d{4,7}(?![0-9A-Za-z])",
    re.IGNORECASE | re.ASCII,
)


def scan_message(text: str) -> list[str]:
    """Distinct CVE ids in a message, uppercased, in first-occurrence order."""
    found: list[str] = []
    seen: set[str] = set()
    for match in MENTION_RE.finditer(text):
        canonical = match.group(0).upper()
        if canonical not in seen:
            seen.add(canonical)
            found.append(canonical)
    return found


@dataclass(frozen=True)
class MentionTimeline:
    """Commits of one repository mentioning one CVE id, in history order."""

    cve_id: str
    mentions: tuple[CommitRecord, ...]

    def __post_init__(self):
        if not self.mentions:
            raise ValueError(f"timeline for {self.cve_id} has no mentions")
        object.__setattr__(self, "mentions", tuple(self.mentions))


@dataclass(frozen=True)
class FixEpisode:
    """Derived lifecycle of one CVE in one repository.

    ``found_commit`` is None for single-mention episodes (the sole mention is
    taken as the fix). Churn totals sum over all mention commits.
    """

    cve_id: str
    found_commit: CommitRecord | None
    fix_commit: CommitRecord
    mention_count: int
    total_lines_changed: int
    total_files_changed: int


def build_timelines(history: RepoHistory) -> dict[str, MentionTimeline]:
    """One timeline per distinct CVE id mentioned anywhere in the history.

    A commit mentioning k distinct ids lands in k timelines; repeated mentions
    of one id within a single message count once. Keys appear in order of
    first mention.
    """
    mentions: dict[str, list[CommitRecord]] = {}
    for commit in history.commits:
        for cve_id in scan_message(commit.message):
            mentions.setdefault(cve_id, []).append(commit)
    return {
        cve_id: MentionTimeline(cve_id=cve_id, mentions=tuple(commits))
        for cve_id, commits in mentions.items()
    }


def derive_episode(timeline: MentionTimeline) -> FixEpisode:
    """Apply the first-mention/last-mention semantics to one timeline."""
    first, last = timeline.mentions[0], timeline.mentions[-1]
    single = len(timeline.mentions) == 1
    return FixEpisode(
        cve_id=timeline.cve_id,
        found_commit=None if single else first,
        fix_commit=last,
        mention_count=len(timeline.mentions),
        total_lines_changed=sum(c.lines_added + c.lines_deleted for c in timeline.mentions),
        total_files_changed=sum(c.files_changed for c in timeline.mentions),
    )
