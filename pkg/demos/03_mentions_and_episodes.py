"""Mention mining walkthrough: from commit messages to fix episodes.

Runs the scanner over tricky message shapes, then builds timelines and
episodes over a synthetic history (no git needed; CommitRecord values are
constructed directly).

    python3 demos/03_mentions_and_episodes.py
"""
from cvemine import CommitRecord, RepoHistory, build_timelines, derive_episode, scan_message

MESSAGES = [
    "Fix CVE-2014-0160 bounds check",
    "backport cve-2019-11043; refs CVE-2019-11043",
    "XCVE-2020-0001 is not an identifier, CVE-99-1 neither",
    "two at once: CVE-2099-0001 and CVE-2099-0002",
    "Merge release notes",
]


def commit(i, message, *, added=0, deleted=0, files=0, author="Dev <dev@example.com>"):
    return CommitRecord(
        hash=f"{i:040x}",
        author=author,
        timestamp=1583020800 + i * 86400,
        message=message,
        parent_count=1 if i else 0,
        files_changed=files,
        lines_added=added,
        lines_deleted=deleted,
    )


def main():
    print("scan_message over assorted messages:")
    for message in MESSAGES:
        print(f"  {message!r:60} -> {scan_message(message)}")

    history = RepoHistory(
        repo_path="synthetic",
        head=f"{4:040x}",
        commits=(
            commit(0, "spot CVE-2099-0001 in decoder", files=2, added=10, deleted=2),
            commit(1, "unrelated cleanup", files=1, added=3, deleted=3),
            commit(2, "note CVE-2099-0002", files=1, added=5, deleted=0),
            commit(3, "fix CVE-2099-0001 for good", files=1, added=3, deleted=3),
            commit(4, "CVE-2099-0001 regressed again; also CVE-2099-0002", files=4, added=8, deleted=1),
        ),
    )

    print("\ntimelines (one per distinct id, history order):")
    timelines = build_timelines(history)
    for cve_id, timeline in timelines.items():
        positions = [m.hash[-1] for m in timeline.mentions]
        print(f"  {cve_id}: mentioned by commits {positions}")

    print("\nepisodes (single mention = fix only; several = found .. fixed):")
    for timeline in timelines.values():
        episode = derive_episode(timeline)
        found = episode.found_commit.hash[-8:] if episode.found_commit else "-"
        print(
            f"  {episode.cve_id}: found=..{found} fix=..{episode.fix_commit.hash[-8:]} "
            f"mentions={episode.mention_count} "
            f"churn={episode.total_lines_changed} lines / {episode.total_files_changed} files"
        )


if __name__ == "__main__":
    main()
