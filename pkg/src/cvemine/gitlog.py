"""Git history extraction: commit metadata plus churn against the predecessor.

Shells out to the git tool with a fixed, documented invocation so the parse is
bit-exact against git's stable output:

    git log <default-branch> --numstat --date=unix --diff-merges=first-parent
            --pretty=format:%x1e%H%x1f%an%x1f%ae%x1f%cd%x1f%P%x1f%B%x1f

Records are separated by 0x1e and fields by 0x1f; the tail of each record
holds the --numstat block. Merge commits are diffed against their first
parent, root commits against the empty tree. The full ancestry of the default
branch head is walked (no --first-parent traversal restriction, no --all).
Requires git >= 2.31 for --diff-merges.
"""
from __future__ import annotations

import json
import re
import subprocess
from dataclasses import dataclass
from pathlib import Path

_RECORD_SEP = "\x1e"
_FIELD_SEP = "\x1f"
LOG_FORMAT = "%x1e%H%x1f%an%x1f%ae%x1f%cd%x1f%P%x1f%B%x1f"
_NUMSTAT_RE = re.compile(r"^(\d+|-)\t(\d+|-)\t(.+)$")

HISTORY_CACHE_VERSION = 1


class GitError(RuntimeError):
    """Environment-level git failure (missing tool, not a repository, bad output)."""


@dataclass(frozen=True)
class CommitRecord:
    """One commit: identity, committer timestamp, message, and first-parent churn.

    ``lines_added``/``lines_deleted`` sum the per-file numstat counts; binary
    files contribute zero lines but still count toward ``files_changed``.
    """

    hash: str
    author: str
    timestamp: int
    message: str
    parent_count: int
    files_changed: int
    lines_added: int
    lines_deleted: int

    @property
    def is_merge(self) -> bool:
        return self.parent_count >= 2

    @property
    def total_lines_changed(self) -> int:
        return self.lines_added + self.lines_deleted


@dataclass(frozen=True)
class RepoHistory:
    """Every commit reachable from the default branch head, ordered ascending.

    Ordering is (timestamp, hash); ties on the committer second break by hash.
    """

    repo_path: str
    head: str
    commits: tuple[CommitRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "commits", tuple(self.commits))
        keys = [(c.timestamp, c.hash) for c in self.commits]
        if keys != sorted(keys):
            raise ValueError("commits not sorted by (timestamp, hash)")
        if len({c.hash for c in self.commits}) != len(self.commits):
            raise ValueError("duplicate commit hashes in history")


def author_key(author: str) -> str:
    """Identity used for contributor counting.

    Case-insensitive email when one is present, otherwise the exact name part.
    """
    start, end = author.rfind("<"), author.rfind(">")
    if 0 <= start < end:
        email = author[start + 1 : end].strip()
        if email:
            return email.lower()
    name = author[:start].strip() if start >= 0 else author.strip()
    return name


def _run_git(repo_path: str | Path, *args: str) -> bytes:
    try:
        proc = subprocess.run(
            ["git", "-C", str(repo_path), *args],
            capture_output=True,
            check=False,
        )
    except FileNotFoundError:
        raise GitError("git executable not found; install git and ensure it is on PATH") from None
    if proc.returncode != 0:
        detail = proc.stderr.decode("utf-8", errors="replace").strip()
        raise GitError(f"git {' '.join(args[:2])} failed in {repo_path}: {detail}")
    return proc.stdout


def _require_repo(repo_path: str | Path) -> None:
    try:
        _run_git(repo_path, "rev-parse", "--git-dir")
    except GitError as exc:
        if "not found" in str(exc) and "executable" in str(exc):
            raise
        raise GitError(f"{repo_path} is not a git repository") from exc


def head_hash(repo_path: str | Path) -> str | None:
    """Hash of HEAD, or None for a repository with no commits yet."""
    _require_repo(repo_path)
    try:
        out = _run_git(repo_path, "rev-parse", "--verify", "--quiet", "HEAD")
    except GitError:
        return None
    return out.decode("ascii").strip() or None

def default_branch(repo_path: str | Path) -> str | None:
    """Short name of the checked-out branch, or None when HEAD is detached."""
    try:
        out = _run_git(repo_path, "symbolic-ref", "--quiet", "--short", "HEAD")
    except GitError:
        return None
    return out.decode("utf-8", errors="replace").strip() or None


def _parse_numstat_block(block: str) -> tuple[int, int, int]:
    files = added = deleted = 0
    for line in block.splitlines():
        match = _NUMSTAT_RE.match(line)
        if not match:
            continue
        files += 1
        if match.group(1) != "-":
            added += int(match.group(1))
        if match.group(2) != "-":
            deleted += int(match.group(2))
    return files, added, deleted


def _parse_log_stream(stream: str) -> list[CommitRecord]:
    records = []
    for chunk in stream.split(_RECORD_SEP):
        if not chunk:
            continue
        parts = chunk.split(_FIELD_SEP)
        if len(parts) != 7:
            raise GitError(
                "unparseable log record (a commit message may contain the "
                "0x1e/0x1f separator bytes)"
            )
        commit_hash, author_name, author_email, committer_date, parents, message, tail = parts
        files, added, deleted = _parse_numstat_block(tail)
        records.append(
            CommitRecord(
                hash=commit_hash,
                author=f"{author_name} <{author_email}>",
                timestamp=int(committer_date),
                message=message,
                parent_count=len(parents.split()) if parents.strip() else 0,
                files_changed=files,
                lines_added=added,
                lines_deleted=deleted,
            )
        )
    return records


def extract_history(repo_path: str | Path) -> RepoHistory:
    """Extract the full history of a repository's default branch head.

    Returns an empty history for a freshly initialized repository. Raises
    GitError when the path is not a repository or git is unavailable.
    Undecodable message bytes are replaced, never fatal.
    """
    repo_path = str(repo_path)
    head = head_hash(repo_path)
    if head is None:
        return RepoHistory(repo_path=repo_path, head="", commits=())
    start = default_branch(repo_path) or head
    out = _run_git(
        repo_path,
        "-c", "diff.renames=true",
        "-c", "log.showSignature=false",
        "log", start,
        "--numstat",
        "--date=unix",
        "--diff-merges=first-parent",
        f"--pretty=format:{LOG_FORMAT}",
    )
    records = _parse_log_stream(out.decode("utf-8", errors="replace"))
    records.sort(key=lambda c: (c.timestamp, c.hash))
    return RepoHistory(repo_path=repo_path, head=head, commits=tuple(records))


def churn_against_predecessor(repo_path: str | Path, commit_hash: str) -> tuple[int, int, int]:
    """(files_changed, lines_added, lines_deleted) of one commit vs its first parent.

    Root commits diff against the empty tree; renames count as one changed
    path; binary files count as a path with zero line churn.
    """
    _require_repo(repo_path)
    parents = _run_git(repo_path, "log", "-1", "--pretty=%P", commit_hash).decode("ascii").split()
    if parents:
        base = parents[0]
    else:
        base = _run_git(repo_path, "hash-object", "-t", "tree", "/dev/null").decode("ascii").strip()
    out = _run_git(
        repo_path, "-c", "diff.renames=true", "diff", "--numstat", base, commit_hash
    )
    return _parse_numstat_block(out.decode("utf-8", errors="replace"))


# -- line-delimited cache ----------------------------------------------------
#
# A history serializes to one JSON object per line, preceded by a header line;
# the cache is invalidated when the repository head hash changes.

def save_history(history: RepoHistory, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        header = {
            "format": "cvemine-history",
            "format_version": HISTORY_CACHE_VERSION,
            "repo_path": history.repo_path,
            "head": history.head,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for commit in history.commits:
            fh.write(
                json.dumps(
                    {
                        "hash": commit.hash,
                        "author": commit.author,
                        "timestamp": commit.timestamp,
                        "message": commit.message,
                        "parent_count": commit.parent_count,
                        "files_changed": commit.files_changed,
                        "lines_added": commit.lines_added,
                        "lines_deleted": commit.lines_deleted,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def load_history(path: str | Path) -> RepoHistory:
    with Path(path).open("r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != "cvemine-history" or header.get("format_version") != HISTORY_CACHE_VERSION:
            raise ValueError(f"{path} is not a history cache file of a supported version")
        commits = tuple(CommitRecord(**json.loads(line)) for line in fh if line.strip())
    return RepoHistory(repo_path=header["repo_path"], head=header["head"], commits=commits)


def cached_extract_history(repo_path: str | Path, cache_path: str | Path) -> RepoHistory:
    """extract_history with a head-keyed cache file; re-extracts when HEAD moved."""
    cache_path = Path(cache_path)
    current_head = head_hash(repo_path) or ""
    if cache_path.exists():
        try:
            cached = load_history(cache_path)
            if cached.head == current_head:
                return cached
        except (ValueError, json.JSONDecodeError, TypeError, KeyError):
            pass  # unreadable cache: fall through to re-extract
    history = extract_history(repo_path)
    save_history(history, cache_path)
    return history
