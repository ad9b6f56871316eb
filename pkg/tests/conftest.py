from __future__ import annotations

import os
import subprocess
from pathlib import Path

import pytest


class RepoBuilder:
    """Scripted git repository construction with pinned identities and dates.

    Every commit sets both author and committer to the given identity and
    pins both dates to the given unix timestamp, so fixture repositories are
    bit-for-bit reproducible across runs.
    """

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.git("-c", "init.defaultBranch=main", "init", "-q")
        self.git("config", "user.name", "Fixture")
        self.git("config", "user.email", "fixture@example.com")

    def git(self, *args: str, env: dict | None = None) -> str:
        full_env = dict(os.environ)
        if env:
            full_env.update(env)
        proc = subprocess.run(
            ["git", "-C", str(self.path), *args],
            check=True,
            capture_output=True,
            env=full_env,
        )
        return proc.stdout.decode("utf-8", errors="replace")

    def write(self, rel_path: str, lines: list[str]) -> None:
        target = self.path / rel_path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text("".join(line + "\n" for line in lines), encoding="utf-8")

    def write_bytes(self, rel_path: str, data: bytes) -> None:
        (self.path / rel_path).write_bytes(data)

    def delete(self, rel_path: str) -> None:
        (self.path / rel_path).unlink()

    def commit(
        self,
        message: str,
        *,
        when: int,
        author: tuple[str, str] = ("Alice", "alice@example.com"),
    ) -> str:
        name, email = author
        env = {
            "GIT_AUTHOR_NAME": name,
            "GIT_AUTHOR_EMAIL": email,
            "GIT_AUTHOR_DATE": f"{when} +0000",
            "GIT_COMMITTER_NAME": name,
            "GIT_COMMITTER_EMAIL": email,
            "GIT_COMMITTER_DATE": f"{when} +0000",
        }
        self.git("add", "-A")
        self.git("commit", "-q", "--allow-empty", "-m", message, env=env)
        return self.head()

    def merge(
        self,
        branch: str,
        message: str,
        *,
        when: int,
        author: tuple[str, str] = ("Alice", "alice@example.com"),
    ) -> str:
        name, email = author
        env = {
            "GIT_AUTHOR_NAME": name,
            "GIT_AUTHOR_EMAIL": email,
            "GIT_AUTHOR_DATE": f"{when} +0000",
            "GIT_COMMITTER_NAME": name,
            "GIT_COMMITTER_EMAIL": email,
            "GIT_COMMITTER_DATE": f"{when} +0000",
        }
        self.git("merge", "-q", "--no-ff", branch, "-m", message, env=env)
        return self.head()

    def branch(self, name: str, start: str | None = None) -> None:
        args = ["checkout", "-q", "-b", name]
        if start:
            args.append(start)
        self.git(*args)

    def checkout(self, name: str) -> None:
        self.git("checkout", "-q", name)

    def head(self) -> str:
        return self.git("rev-parse", "HEAD").strip()


@pytest.fixture
def repo_builder(tmp_path):
    def factory(name: str = "repo") -> RepoBuilder:
        return RepoBuilder(tmp_path / name)

    return factory


@pytest.fixture
def three_commit_repo(repo_builder):
    """Linear fixture: 3 commits touching 1, 2, 1 files with +10/-0, +5/-3, +1/-1.

    Line contents are unique per version so the numstat counts are exactly the
    hand-counted ones. Net line change is 12 = final tree line count (9 + 3).
    """
    repo = repo_builder("linear3")
    repo.write("a.txt", [f"a-line-{i:02d}-v1" for i in range(10)])
    c1 = repo.commit("start parser skeleton", when=1_600_000_000, author=("Alice", "alice@example.com"))
    # a.txt: drop the last 3 lines, append 2 fresh ones (+2/-3); b.txt: new, 3 lines (+3/-0)
    repo.write("a.txt", [f"a-line-{i:02d}-v1" for i in range(7)] + ["a-extra-1-v2", "a-extra-2-v2"])
    repo.write("b.txt", ["b-one-v1", "b-two-v1", "b-three-v1"])
    c2 = repo.commit("split helpers out", when=1_600_086_400, author=("Bob", "bob@example.com"))
    # b.txt: replace one line (+1/-1)
    repo.write("b.txt", ["b-one-v1", "b-two-v2", "b-three-v1"])
    c3 = repo.commit("fix helper off-by-one", when=1_600_172_800, author=("Alice", "alice@example.com"))
    return repo, (c1, c2, c3)


def make_commit(i, message, *, author="Alice <alice@example.com>", files=0, added=0, deleted=0, parents=None):
    """Synthetic CommitRecord with a stable hash and hour-spaced timestamps."""
    from cvemine.gitlog import CommitRecord

    return CommitRecord(
        hash=f"{i:040x}",
        author=author,
        timestamp=1_600_000_000 + i * 3600,
        message=message,
        parent_count=(1 if i else 0) if parents is None else parents,
        files_changed=files,
        lines_added=added,
        lines_deleted=deleted,
    )


def make_history(messages, authors=None):
    """Synthetic linear RepoHistory from a list of commit messages."""
    from cvemine.gitlog import RepoHistory

    commits = tuple(
        make_commit(i, m, author=(authors[i] if authors else "Alice <alice@example.com>"))
        for i, m in enumerate(messages)
    )
    return RepoHistory(
        repo_path="synthetic", head=commits[-1].hash if commits else "", commits=commits
    )


def feed_item(
    cve_id,
    published=None,
    v3_score=None,
    v3_severity=None,
    v2_score=None,
    cwes=(),
):
    """One NVD 1.1 feed item with exactly the fields the parser reads."""
    item = {
        "cve": {
            "CVE_data_meta": {"ID": cve_id},
            "problemtype": {
                "problemtype_data": [{"description": [{"value": c} for c in cwes]}]
            },
        },
        "impact": {},
    }
    if published is not None:
        item["publishedDate"] = published
    if v3_score is not None:
        cvss = {"baseScore": v3_score}
        if v3_severity is not None:
            cvss["baseSeverity"] = v3_severity
        item["impact"]["baseMetricV3"] = {"cvssV3": cvss}
    if v2_score is not None:
        item["impact"]["baseMetricV2"] = {"cvssV2": {"baseScore": v2_score}}
    return item


def feed_doc(items):
    return {
        "CVE_data_type": "CVE",
        "CVE_data_format": "MITRE",
        "CVE_data_version": "4.0",
        "CVE_Items": list(items),
    }
