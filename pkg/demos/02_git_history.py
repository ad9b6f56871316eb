"""Git extraction walkthrough: per-commit churn against the predecessor.

Scripts a small repository (including a merge), extracts its history, and
prints the per-commit stats, showing that merge churn is measured against the
first parent and that the line-delimited cache survives a round trip.

    python3 demos/02_git_history.py
"""
import os
import subprocess
import tempfile
from pathlib import Path

from cvemine import cached_extract_history, churn_against_predecessor, extract_history

DAY = 86400
T0 = 1583020800  # 2020-03-01T00:00Z


def git(repo, *args, when=None, who=("Demo", "demo@example.com")):
    env = dict(os.environ)
    if when is not None:
        name, email = who
        env.update(
            GIT_AUTHOR_NAME=name, GIT_AUTHOR_EMAIL=email, GIT_AUTHOR_DATE=f"{when} +0000",
            GIT_COMMITTER_NAME=name, GIT_COMMITTER_EMAIL=email, GIT_COMMITTER_DATE=f"{when} +0000",
        )
    subprocess.run(["git", "-C", str(repo), *args], check=True, capture_output=True, env=env)


def write_lines(repo, rel, lines):
    (Path(repo) / rel).write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


def build_repo(repo):
    git(repo, "-c", "init.defaultBranch=main", "init", "-q")
    git(repo, "config", "user.name", "Demo")
    git(repo, "config", "user.email", "demo@example.com")

    write_lines(repo, "core.c", [f"core line {i}" for i in range(6)])
    git(repo, "add", "-A")
    git(repo, "commit", "-q", "-m", "initial core", when=T0, who=("Ada", "ada@example.com"))

    git(repo, "checkout", "-q", "-b", "feature")
    write_lines(repo, "feature.c", ["feature one", "feature two", "feature three"])
    git(repo, "add", "-A")
    git(repo, "commit", "-q", "-m", "feature work", when=T0 + DAY, who=("Ben", "ben@example.com"))

    git(repo, "checkout", "-q", "main")
    write_lines(repo, "core.c", [f"core line {i}" for i in range(6)] + ["core appended"])
    git(repo, "add", "-A")
    git(repo, "commit", "-q", "-m", "touch core", when=T0 + 2 * DAY, who=("Ada", "ada@example.com"))

    git(repo, "merge", "-q", "--no-ff", "feature", "-m", "merge feature", when=T0 + 3 * DAY, who=("Cay", "cay@example.com"))


def main():
    with tempfile.TemporaryDirectory() as workdir:
        repo = Path(workdir) / "demo-repo"
        repo.mkdir()
        build_repo(repo)

        history = extract_history(repo)
        print(f"extracted {len(history.commits)} commits from {repo}")
        print(f"{'hash':12} {'when':>10} {'merge':5} {'files':>5} {'+':>4} {'-':>4}  subject")
        for c in history.commits:
            subject = c.message.splitlines()[0]
            print(
                f"{c.hash[:10]:12} {c.timestamp:>10} {str(c.is_merge):5} "
                f"{c.files_changed:>5} {c.lines_added:>4} {c.lines_deleted:>4}  {subject}"
            )

        merge = history.commits[-1]
        print("\nthe merge commit diffs against its first parent only:")
        print(f"  churn_against_predecessor -> {churn_against_predecessor(repo, merge.hash)}")

        cache = Path(workdir) / "history-cache.jsonl"
        cached_extract_history(repo, cache)
        again = cached_extract_history(repo, cache)  # served from the cache file
        print(f"\ncache file {cache.name}: {len(cache.read_text().splitlines())} lines, "
              f"round-trips equal: {again == history}")


if __name__ == "__main__":
    main()
