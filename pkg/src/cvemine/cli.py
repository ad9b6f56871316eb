"""Command-line pipeline: feed ingestion, multi-target mining, report emission.

Subcommands:

    fetch-feeds  download yearly NVD JSON feeds into a local directory
    ingest       load downloaded feed files into the local CVE store
    mine         run the full pipeline over the targets of a JSON config
    report       re-aggregate and re-emit a previously mined report

Targets are mined by a bounded worker pool; the store is only read once
mining starts, so workers share it safely. A failing target is recorded in
the report's error section and never disturbs the other targets.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import shutil
import sys
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, NamedTuple, Sequence

from . import gitlog, report as report_mod
from .gitlog import GitError, cached_extract_history
from .mentions import build_timelines, derive_episode
from .report import ProjectResult, TargetError, emit_report, make_entry
from .stats import compute_metrics
from .store import DEFAULT_STORE_DIR, CveStore, ingest_directory

log = logging.getLogger("cvemine")

DEFAULT_REPOS_DIR = "./repos"
DEFAULT_OUTPUT_DIR = "./reports"
NVD_FEED_BASE_URL = "https://nvd.nist.gov/feeds/json/cve/1.1"
FIRST_FEED_YEAR = 2002


class ConfigError(ValueError):
    """Target configuration is invalid; lists every violation at once."""

    def __init__(self, violations: Sequence[str]):
        super().__init__("invalid target config: " + "; ".join(violations))
        self.violations = list(violations)


class PipelineError(RuntimeError):
    """Hard pipeline failure (e.g. mining against an empty store)."""


class AcquireError(RuntimeError):
    """A target's repository could not be made available locally."""


@dataclass(frozen=True)
class Target:
    name: str
    source: str
    language: str


@dataclass(frozen=True)
class TargetConfig:
    targets: tuple[Target, ...]
    store_dir: str = DEFAULT_STORE_DIR
    repos_dir: str = DEFAULT_REPOS_DIR
    output_dir: str = DEFAULT_OUTPUT_DIR


def parse_target_config(document: Mapping[str, Any]) -> TargetConfig:
    """Validate a parsed config document, collecting all violations."""
    violations: list[str] = []
    if not isinstance(document, Mapping):
        raise ConfigError(["config document is not a JSON object"])
    raw_targets = document.get("targets")
    if raw_targets is None:
        violations.append("targets: required field is missing")
        raw_targets = []
    elif not isinstance(raw_targets, list):
        violations.append("targets: must be a list")
        raw_targets = []

    targets: list[Target] = []
    seen_names: set[str] = set()
    for i, raw in enumerate(raw_targets):
        if not isinstance(raw, Mapping):
            violations.append(f"targets[{i}]: must be an object")
            continue
        name = raw.get("name")
        source = raw.get("source")
        language = raw.get("language")
        ok = True
        if not isinstance(name, str) or not name.strip():
            violations.append(f"targets[{i}]: missing or empty name")
            ok = False
        if not isinstance(source, str) or not source.strip():
            violations.append(f"targets[{i}]: missing or empty source")
            ok = False
        if not isinstance(language, str) or not language.strip():
            violations.append(f"targets[{i}]: missing or empty language")
            ok = False
        if ok and name in seen_names:
            violations.append(f"targets[{i}]: duplicate target name {name!r}")
            ok = False
        if ok:
            seen_names.add(name)
            targets.append(Target(name=name, source=source, language=language))

    dirs = {}
    for key, default in (
        ("store_dir", DEFAULT_STORE_DIR),
        ("repos_dir", DEFAULT_REPOS_DIR),
        ("output_dir", DEFAULT_OUTPUT_DIR),
    ):
        value = document.get(key, default)
        if not isinstance(value, str) or not value:
            violations.append(f"{key}: must be a non-empty string")
            value = default
        dirs[key] = value

    if violations:
        raise ConfigError(violations)
    return TargetConfig(targets=tuple(targets), **dirs)


def load_targets(path: str | Path) -> TargetConfig:
    """Load and validate a JSON target config file."""
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from exc
    return parse_target_config(document)


_SCP_LIKE_RE = re.compile(r"^[\w.~-]+@[\w.-]+:")


def is_remote_source(source: str) -> bool:
    return "://" in source or bool(_SCP_LIKE_RE.match(source))


def acquire_repo(target: Target, repos_dir: str | Path, refresh: bool = False) -> Path:
    """Make the target's repository available locally and return its path.

    Local sources are used in place. Remote sources are cloned once into
    repos_dir/<name> and reused on later runs without touching the network;
    with ``refresh`` the clone is fetched and hard-reset to the remote default
    branch.
    """
    if not is_remote_source(target.source):
        path = Path(target.source)
        if not path.is_dir():
            raise AcquireError(f"local source is not a directory: {target.source}")
        return path

    dest = Path(repos_dir) / target.name
    if not dest.exists():
        Path(repos_dir).mkdir(parents=True, exist_ok=True)
        log.info("cloning %s from %s", target.name, target.source)
        try:
            gitlog._run_git(".", "clone", "--", target.source, str(dest))
        except GitError as exc:
            shutil.rmtree(dest, ignore_errors=True)
            raise AcquireError(f"clone failed: {exc}") from exc
    elif refresh:
        log.info("refreshing %s", target.name)
        try:
            gitlog._run_git(dest, "fetch", "--prune", "origin")
            try:
                ref = (
                    gitlog._run_git(
                        dest, "symbolic-ref", "--quiet", "--short", "refs/remotes/origin/HEAD"
                    )
                    .decode("utf-8")
                    .strip()
                )
            except GitError:
                ref = "FETCH_HEAD"
            gitlog._run_git(dest, "reset", "--hard", ref)
        except GitError as exc:
            raise AcquireError(f"refresh failed: {exc}") from exc
    return dest


def mine_target(
    target: Target, store_dir: str | Path, repos_dir: str | Path, refresh: bool = False
) -> ProjectResult:
    """Run the per-target pipeline: acquire, extract, scan, join, evaluate."""
    repo_path = acquire_repo(target, repos_dir, refresh=refresh)
    cache_path = Path(repos_dir) / ".history-cache" / f"{target.name}.jsonl"
    history = cached_extract_history(repo_path, cache_path)
    timelines = build_timelines(history)
    entries = []
    with CveStore(store_dir) as store:
        for timeline in timelines.values():
            episode = derive_episode(timeline)
            record = store.lookup(episode.cve_id)
            metrics = compute_metrics(episode, history, record)
            entries.append(make_entry(episode, metrics, record))
    log.info("mined %s: %d commits, %d episodes", target.name, len(history.commits), len(entries))
    return ProjectResult.from_entries(target.name, target.language, entries)


class PipelineOutcome(NamedTuple):
    exit_code: int
    results: list[ProjectResult]
    errors: list[TargetError]
    written: dict[str, list[Path]]


def run_pipeline(
    config: TargetConfig,
    *,
    refresh: bool = False,
    jobs: int | None = None,
    formats: Sequence[str] = ("json",),
    ingest_feeds_dir: str | Path | None = None,
    output_dir: str | Path | None = None,
    generated_at: str | None = None,
) -> PipelineOutcome:
    """Mine every configured target and emit reports.

    Per-target failures are isolated into the report's error section; the
    exit code is 0 iff at least one target was mined. Mining an empty store
    is refused up front.
    """
    if ingest_feeds_dir is not None:
        with CveStore(config.store_dir) as store:
            result = ingest_directory(store, ingest_feeds_dir)
            log.info("ingested %d records (%d items skipped)", result.ingested, result.skipped)

    with CveStore(config.store_dir) as store:
        if store.record_count() == 0:
            raise PipelineError(
                f"CVE store at {config.store_dir} is empty; "
                "run `cvemine ingest --feeds <dir>` first (or pass --ingest)"
            )

    results: list[ProjectResult] = []
    errors: list[TargetError] = []
    if config.targets:
        workers = jobs or os.cpu_count() or 1
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(mine_target, t, config.store_dir, config.repos_dir, refresh)
                for t in config.targets
            ]
            for target, future in zip(config.targets, futures):
                try:
                    results.append(future.result())
                except (AcquireError, GitError, OSError) as exc:
                    log.warning("target %s failed: %s", target.name, exc)
                    errors.append(TargetError(target=target.name, message=str(exc)))

    written = emit_report(
        results,
        output_dir or config.output_dir,
        formats=formats,
        errors=errors,
        generated_at=generated_at,
    )
    exit_code = 0 if results else 1
    return PipelineOutcome(exit_code=exit_code, results=results, errors=errors, written=written)


# -- feed downloading ----------------------------------------------------------

def feed_urls(years: Sequence[int], base_url: str = NVD_FEED_BASE_URL) -> list[str]:
    return [f"{base_url}/nvdcve-1.1-{year}.json.gz" for year in years]


def parse_year_range(text: str) -> list[int]:
    """'2002-2005' or a single year; validation errors raise ValueError."""
    parts = text.split("-")
    if len(parts) == 1:
        return [int(parts[0])]
    if len(parts) == 2:
        start, end = int(parts[0]), int(parts[1])
        if start > end:
            raise ValueError(f"year range is reversed: {text}")
        return list(range(start, end + 1))
    raise ValueError(f"not a year or year range: {text}")


def fetch_feeds(dest_dir: str | Path, years: Sequence[int], base_url: str = NVD_FEED_BASE_URL) -> list[Path]:
    """Download the yearly feed files; honors standard proxy environment variables."""
    dest_dir = Path(dest_dir)
    dest_dir.mkdir(parents=True, exist_ok=True)
    fetched = []
    for url in feed_urls(years, base_url):
        out_path = dest_dir / url.rsplit("/", 1)[1]
        log.info("downloading %s", url)
        with urllib.request.urlopen(url) as response:
            out_path.write_bytes(response.read())
        fetched.append(out_path)
    return fetched


# -- entry point -----------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvemine",
        description="Mine git histories for CVE mentions and compute fix-lifecycle statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fetch = sub.add_parser("fetch-feeds", help="download yearly NVD JSON feeds")
    p_fetch.add_argument("--dest", required=True, help="directory for the downloaded feed files")
    p_fetch.add_argument(
        "--years",
        default=f"{FIRST_FEED_YEAR}-{datetime.now(timezone.utc).year}",
        help="year or inclusive range, e.g. 2015-2024 (default: %(default)s)",
    )
    p_fetch.add_argument("--base-url", default=NVD_FEED_BASE_URL)

    p_ingest = sub.add_parser("ingest", help="ingest downloaded feed files into the store")
    p_ingest.add_argument("--feeds", required=True, help="directory of .json/.json.gz feed files")
    p_ingest.add_argument("--store", default=DEFAULT_STORE_DIR, help="store directory (default: %(default)s)")

    p_mine = sub.add_parser("mine", help="mine the targets of a JSON config file")
    p_mine.add_argument("--config", required=True, help="target config file")
    p_mine.add_argument("--refresh", action="store_true", help="fetch and reset existing clones")
    p_mine.add_argument("--jobs", type=int, default=None, help="worker pool size (default: CPU count)")
    p_mine.add_argument("--output", default=None, help="report directory (default: config output_dir)")
    p_mine.add_argument(
        "--format",
        choices=report_mod.REPORT_FORMATS,
        default="json",
        help="additional report format; the canonical JSON document is always written",
    )
    p_mine.add_argument("--ingest", action="store_true", help="ingest --feeds before mining")
    p_mine.add_argument("--feeds", default=None, help="feed directory for --ingest")

    p_report = sub.add_parser("report", help="re-aggregate a mined report without re-mining")
    p_report.add_argument("--input", required=True, help="previously emitted report.json")
    p_report.add_argument("--format", choices=report_mod.REPORT_FORMATS, default="json")
    p_report.add_argument("--output", default=None, help="output directory (default: alongside input)")

    return parser


def _cmd_ingest(args) -> int:
    with CveStore(args.store) as store:
        result = ingest_directory(store, args.feeds)
        print(
            f"ingested {result.ingested} records into {store.path} "
            f"({result.skipped} items skipped)"
        )
    return 0


def _cmd_mine(args) -> int:
    if args.ingest and not args.feeds:
        print("--ingest requires --feeds", file=sys.stderr)
        return 2
    config = load_targets(args.config)
    formats = ("json",) if args.format == "json" else ("json", args.format)
    outcome = run_pipeline(
        config,
        refresh=args.refresh,
        jobs=args.jobs,
        formats=formats,
        ingest_feeds_dir=args.feeds if args.ingest else None,
        output_dir=args.output,
    )
    for error in outcome.errors:
        print(f"target {error.target} failed: {error.message}", file=sys.stderr)
    for fmt, paths in outcome.written.items():
        for path in paths:
            print(f"{fmt}: {path}")
    print(f"mined {len(outcome.results)} of {len(config.targets)} targets")
    return outcome.exit_code


def _cmd_report(args) -> int:
    document = report_mod.load_document(args.input)
    results, errors = report_mod.results_from_document(document)
    output_dir = args.output or Path(args.input).parent
    written = emit_report(results, output_dir, formats=(args.format,), errors=errors)
    for fmt, paths in written.items():
        for path in paths:
            print(f"{fmt}: {path}")
    return 0


def _cmd_fetch_feeds(args) -> int:
    years = parse_year_range(args.years)
    paths = fetch_feeds(args.dest, years, args.base_url)
    print(f"downloaded {len(paths)} feed files into {args.dest}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "mine":
            return _cmd_mine(args)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "fetch-feeds":
            return _cmd_fetch_feeds(args)
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 2
    except (PipelineError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
