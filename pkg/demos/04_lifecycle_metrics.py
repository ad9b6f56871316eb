"""Lifecycle metrics walkthrough: fix latency, activity windows, correlation.

Derives every per-episode metric over a synthetic history and shows how the
per-language aggregates (means, Pearson coefficients, CWE shares) are built
from them.

    python3 demos/04_lifecycle_metrics.py
"""
from cvemine import (
    CommitRecord,
    CveRecord,
    RepoHistory,
    aggregate_language,
    build_timelines,
    compute_metrics,
    derive_episode,
    make_entry,
    pearson,
)
from cvemine.report import ProjectResult

DAY = 86400
T0 = 1583020800

AUTHORS = ["Ada <ada@example.com>", "Ben <ben@example.com>", "Cay <cay@example.com>"]

RECORDS = {
    "CVE-2099-0001": CveRecord(id="CVE-2099-0001", published=T0 - 10 * DAY, base_score=7.5, severity="HIGH", cwe_ids=("CWE-79",)),
    "CVE-2099-0002": CveRecord(id="CVE-2099-0002", published=T0 + 4 * DAY, base_score=5.0, severity="MEDIUM", cwe_ids=("CWE-119", "CWE-20")),
    "CVE-2099-0003": CveRecord(id="CVE-2099-0003", published=T0, base_score=9.8, severity="CRITICAL", cwe_ids=()),
}


def make_history():
    messages = [
        "found CVE-2099-0001",
        "mention CVE-2099-0002",
        "note CVE-2099-0003",
        "fix CVE-2099-0001",
        "fix CVE-2099-0003",
        "fix CVE-2099-0002",
    ]
    commits = tuple(
        CommitRecord(
            hash=f"{i:040x}",
            author=AUTHORS[i % len(AUTHORS)],
            timestamp=T0 + i * 2 * DAY,
            message=m,
            parent_count=1 if i else 0,
            files_changed=1 + i % 3,
            lines_added=5 * (i + 1),
            lines_deleted=i,
        )
        for i, m in enumerate(messages)
    )
    return RepoHistory(repo_path="synthetic", head=commits[-1].hash, commits=commits)


def main():
    history = make_history()
    entries = []
    print("per-episode metrics:")
    for timeline in build_timelines(history).values():
        episode = derive_episode(timeline)
        record = RECORDS.get(episode.cve_id)
        metrics = compute_metrics(episode, history, record)
        entries.append(make_entry(episode, metrics, record))
        print(
            f"  {episode.cve_id}: elapsed={metrics.elapsed_fix_days} days, "
            f"publication_to_fix={metrics.publication_to_fix_days} days, "
            f"window={metrics.contributors_between} contributors / {metrics.commits_between} commits, "
            f"score={metrics.base_score}"
        )

    stats = aggregate_language([ProjectResult.from_entries("demo", "python", entries)])["python"]
    print("\npooled language aggregates:")
    print(f"  episodes:              {stats.episode_count}")
    print(f"  mean elapsed days:     {stats.mean_elapsed_fix_days}")
    print(f"  mean publication-fix:  {stats.mean_publication_to_fix_days}")
    print(f"  mean churn:            {stats.mean_total_lines_changed} lines / {stats.mean_total_files_changed} files")
    for corr in stats.correlations:
        print(f"  {corr.pair_name}: r={corr.coefficient} over {corr.sample_size} pairs")
    print(f"  CWE shares:            {[(label, round(pct, 2)) for label, pct in stats.cwe_distribution]}")

    print("\npearson on its own (absent below 3 pairs or at zero variance):")
    print(f"  [1,2,3] vs [2,4,6]   -> {pearson([1, 2, 3], [2, 4, 6])}")
    print(f"  [1,2,3] vs [6,4,2]   -> {pearson([1, 2, 3], [6, 4, 2])}")
    print(f"  [1,2]   vs [2,1]     -> {pearson([1, 2], [2, 1])}")
    print(f"  [5,5,5] vs [1,2,3]   -> {pearson([5, 5, 5], [1, 2, 3])}")


if __name__ == "__main__":
    main()
