"""Aggregation of mined episodes into per-language statistics and report files.

One mining run produces a single self-describing JSON document (per-project
episode lists plus per-language aggregates) from which the flat CSV tables and
the per-figure chart-data series are rendered. Episode entries embed the
joined store fields (score, CWE labels), so a saved document can be
re-aggregated and re-emitted without the store or the repositories.
"""
from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .mentions import FixEpisode
from .stats import (
    MIN_CORRELATION_SAMPLE,
    CorrelationResult,
    EpisodeMetrics,
    mean,
    pearson,
)

SCHEMA_VERSION = "1"
UNMAPPED_LABEL = "UNMAPPED"
CORRELATION_PAIRS = ("score_vs_elapsed", "score_vs_publication_to_fix")

# Methodological choices recorded in every report for auditability.
REPORT_DECISIONS = {
    "activity_window": "commits strictly after the found commit up to and including the fix commit",
    "branch_scope": "full ancestry of the default branch head",
    "correlation_method": "sample Pearson, absent below 3 pairs or at zero variance",
    "day_length_seconds": 86400,
    "fix_selection": "last mention fixes; first of several mentions marks the finding",
    "merge_churn": "merge commits diffed against their first parent",
    "mention_matching": "context-free pattern match over commit messages, merges included",
    "multi_label_cwe": "an episode counts once per CWE label of its record",
    "negative_publication_to_fix": "retained, not clamped",
    "score_preference": "CVSS v3 base score preferred over v2",
    "single_mention_episodes": "excluded from elapsed-fix and activity averages",
    "timestamp_source": "committer date, UTC",
}


class TargetError(NamedTuple):
    """A per-target failure recorded in the report instead of aborting the run."""

    target: str
    message: str


@dataclass(frozen=True)
class EpisodeEntry:
    """One mined episode flattened with its metrics and joined store fields."""

    cve_id: str
    found_hash: str | None
    fix_hash: str
    mention_count: int
    total_lines_changed: int
    total_files_changed: int
    elapsed_fix_days: float | None
    publication_to_fix_days: float | None
    contributors_between: int | None
    commits_between: int | None
    base_score: float | None
    cwe_ids: tuple[str, ...]
    in_store: bool


def make_entry(episode: FixEpisode, metrics: EpisodeMetrics, record) -> EpisodeEntry:
    """Join one episode with its metrics and (possibly absent) store record."""
    return EpisodeEntry(
        cve_id=episode.cve_id,
        found_hash=episode.found_commit.hash if episode.found_commit else None,
        fix_hash=episode.fix_commit.hash,
        mention_count=episode.mention_count,
        total_lines_changed=episode.total_lines_changed,
        total_files_changed=episode.total_files_changed,
        elapsed_fix_days=metrics.elapsed_fix_days,
        publication_to_fix_days=metrics.publication_to_fix_days,
        contributors_between=metrics.contributors_between,
        commits_between=metrics.commits_between,
        base_score=metrics.base_score,
        cwe_ids=tuple(record.cwe_ids) if record is not None else (),
        in_store=record is not None,
    )


@dataclass(frozen=True)
class ProjectResult:
    project_name: str
    language: str
    episodes: tuple[EpisodeEntry, ...]
    join_misses: int

    @classmethod
    def from_entries(cls, project_name: str, language: str, entries: Sequence[EpisodeEntry]):
        return cls(
            project_name=project_name,
            language=language,
            episodes=tuple(entries),
            join_misses=sum(1 for e in entries if not e.in_store),
        )


@dataclass(frozen=True)
class LanguageStats:
    """Pooled metrics for every project sharing one language label."""

    language: str
    episode_count: int
    mean_elapsed_fix_days: float | None
    mean_publication_to_fix_days: float | None
    mean_contributors: float | None
    mean_commits_between: float | None
    mean_total_lines_changed: float | None
    mean_total_files_changed: float | None
    correlations: tuple[CorrelationResult, ...]
    cwe_distribution: tuple[tuple[str, float], ...]


def _distribution_from_label_lists(label_lists: Iterable[Sequence[str]]) -> list[tuple[str, float]]:
    """Percentage share per label; episodes without labels fall into UNMAPPED.

    An episode contributes one count to every label it carries, so multi-label
    episodes appear in several groups. Percentages are over total
    contributions and sum to 100 for non-empty input.
    """
    counts: Counter[str] = Counter()
    for labels in label_lists:
        if labels:
            counts.update(labels)
        else:
            counts[UNMAPPED_LABEL] += 1
    total = sum(counts.values())
    if total == 0:
        return []
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [(label, 100.0 * count / total) for label, count in ordered]


def cwe_distribution(episodes: Sequence[FixEpisode], store) -> list[tuple[str, float]]:
    """CWE share of a set of episodes, resolving labels through the store.

    ``store`` only needs a ``lookup(cve_id)`` returning an object with
    ``cwe_ids`` or None.
    """
    label_lists = []
    for episode in episodes:
        record = store.lookup(episode.cve_id)
        label_lists.append(tuple(record.cwe_ids) if record is not None else ())
    return _distribution_from_label_lists(label_lists)


def _correlation(pair_name: str, pairs: Sequence[tuple[float, float]]) -> CorrelationResult:
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    coefficient = pearson(xs, ys) if len(pairs) >= MIN_CORRELATION_SAMPLE else None
    return CorrelationResult(pair_name=pair_name, coefficient=coefficient, sample_size=len(pairs))


def aggregate_language(results: Iterable[ProjectResult]) -> dict[str, LanguageStats]:
    """Pool episodes of all projects sharing a language label and aggregate.

    Absent per-episode metrics are excluded from their mean rather than
    contributing zeros; a mean over no values is absent. Returned dict is
    keyed by language in sorted label order.
    """
    pooled: dict[str, list[EpisodeEntry]] = {}
    for result in results:
        pooled.setdefault(result.language, []).extend(result.episodes)

    stats: dict[str, LanguageStats] = {}
    for language in sorted(pooled):
        entries = pooled[language]
        elapsed = [e.elapsed_fix_days for e in entries if e.elapsed_fix_days is not None]
        to_fix = [
            e.publication_to_fix_days for e in entries if e.publication_to_fix_days is not None
        ]
        contributors = [e.contributors_between for e in entries if e.contributors_between is not None]
        commits = [e.commits_between for e in entries if e.commits_between is not None]
        score_elapsed = [
            (e.base_score, e.elapsed_fix_days)
            for e in entries
            if e.base_score is not None and e.elapsed_fix_days is not None
        ]
        score_to_fix = [
            (e.base_score, e.publication_to_fix_days)
            for e in entries
            if e.base_score is not None and e.publication_to_fix_days is not None
        ]
        stats[language] = LanguageStats(
            language=language,
            episode_count=len(entries),
            mean_elapsed_fix_days=mean(elapsed),
            mean_publication_to_fix_days=mean(to_fix),
            mean_contributors=mean(contributors),
            mean_commits_between=mean(commits),
            mean_total_lines_changed=mean([e.total_lines_changed for e in entries]),
            mean_total_files_changed=mean([e.total_files_changed for e in entries]),
            correlations=(
                _correlation("score_vs_elapsed", score_elapsed),
                _correlation("score_vs_publication_to_fix", score_to_fix),
            ),
            cwe_distribution=tuple(_distribution_from_label_lists([e.cwe_ids for e in entries])),
        )
    return stats


# -- document construction ----------------------------------------------------

def _entry_to_json(entry: EpisodeEntry) -> dict:
    return {
        "cve_id": entry.cve_id,
        "found_hash": entry.found_hash,
        "fix_hash": entry.fix_hash,
        "mention_count": entry.mention_count,
        "total_lines_changed": entry.total_lines_changed,
        "total_files_changed": entry.total_files_changed,
        "elapsed_fix_days": entry.elapsed_fix_days,
        "publication_to_fix_days": entry.publication_to_fix_days,
        "contributors_between": entry.contributors_between,
        "commits_between": entry.commits_between,
        "base_score": entry.base_score,
        "cwe_ids": list(entry.cwe_ids),
        "in_store": entry.in_store,
    }


def _language_to_json(stats: LanguageStats) -> dict:
    return {
        "language": stats.language,
        "episode_count": stats.episode_count,
        "mean_elapsed_fix_days": stats.mean_elapsed_fix_days,
        "mean_publication_to_fix_days": stats.mean_publication_to_fix_days,
        "mean_contributors": stats.mean_contributors,
        "mean_commits_between": stats.mean_commits_between,
        "mean_total_lines_changed": stats.mean_total_lines_changed,
        "mean_total_files_changed": stats.mean_total_files_changed,
        "correlations": [
            {
                "pair_name": c.pair_name,
                "coefficient": c.coefficient,
                "sample_size": c.sample_size,
            }
            for c in stats.correlations
        ],
        "cwe_distribution": [
            {"label": label, "percentage": pct} for label, pct in stats.cwe_distribution
        ],
    }


def build_document(
    results: Sequence[ProjectResult],
    errors: Sequence[TargetError] = (),
    generated_at: str | None = None,
) -> dict:
    """Assemble the canonical JSON report document from project results."""
    languages = aggregate_language(results)
    return {
        "schema_version": SCHEMA_VERSION,
        "generated_at": generated_at
        or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "decisions": dict(REPORT_DECISIONS),
        "projects": [
            {
                "project_name": r.project_name,
                "language": r.language,
                "join_misses": r.join_misses,
                "episodes": [_entry_to_json(e) for e in r.episodes],
            }
            for r in results
        ],
        "languages": [_language_to_json(languages[lang]) for lang in sorted(languages)],
        "errors": [{"target": e.target, "message": e.message} for e in errors],
    }


def canonical_json(document: Mapping) -> str:
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def results_from_document(document: Mapping) -> tuple[list[ProjectResult], list[TargetError]]:
    """Rebuild project results from a saved report for re-aggregation."""
    results = []
    for project in document["projects"]:
        entries = tuple(
            EpisodeEntry(
                cve_id=e["cve_id"],
                found_hash=e["found_hash"],
                fix_hash=e["fix_hash"],
                mention_count=e["mention_count"],
                total_lines_changed=e["total_lines_changed"],
                total_files_changed=e["total_files_changed"],
                elapsed_fix_days=e["elapsed_fix_days"],
                publication_to_fix_days=e["publication_to_fix_days"],
                contributors_between=e["contributors_between"],
                commits_between=e["commits_between"],
                base_score=e["base_score"],
                cwe_ids=tuple(e["cwe_ids"]),
                in_store=e["in_store"],
            )
            for e in project["episodes"]
        )
        results.append(
            ProjectResult(
                project_name=project["project_name"],
                language=project["language"],
                episodes=entries,
                join_misses=project["join_misses"],
            )
        )
    errors = [TargetError(e["target"], e["message"]) for e in document.get("errors", [])]
    return results, errors


# -- emission ------------------------------------------------------------------

REPORT_FORMATS = ("json", "csv", "chart-data")

_CSV_EPISODE_COLUMNS = (
    "project_name",
    "language",
    "cve_id",
    "found_hash",
    "fix_hash",
    "mention_count",
    "total_lines_changed",
    "total_files_changed",
    "elapsed_fix_days",
    "publication_to_fix_days",
    "contributors_between",
    "commits_between",
    "base_score",
    "cwe_ids",
    "in_store",
)

_CSV_LANGUAGE_COLUMNS = (
    "language",
    "episode_count",
    "mean_elapsed_fix_days",
    "mean_publication_to_fix_days",
    "mean_contributors",
    "mean_commits_between",
    "mean_total_lines_changed",
    "mean_total_files_changed",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _emit_csv(document: Mapping, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    episodes_path = out_dir / "episodes.csv"
    _write_csv(
        episodes_path,
        _CSV_EPISODE_COLUMNS,
        (
            [
                project["project_name"],
                project["language"],
                e["cve_id"],
                e["found_hash"],
                e["fix_hash"],
                e["mention_count"],
                e["total_lines_changed"],
                e["total_files_changed"],
                e["elapsed_fix_days"],
                e["publication_to_fix_days"],
                e["contributors_between"],
                e["commits_between"],
                e["base_score"],
                "|".join(e["cwe_ids"]),
                e["in_store"],
            ]
            for project in document["projects"]
            for e in project["episodes"]
        ),
    )
    languages_path = out_dir / "language_stats.csv"
    _write_csv(
        languages_path,
        _CSV_LANGUAGE_COLUMNS,
        ([lang[c] for c in _CSV_LANGUAGE_COLUMNS] for lang in document["languages"]),
    )
    correlations_path = out_dir / "correlations.csv"
    _write_csv(
        correlations_path,
        ("language", "pair_name", "coefficient", "sample_size"),
        (
            [lang["language"], c["pair_name"], c["coefficient"], c["sample_size"]]
            for lang in document["languages"]
            for c in lang["correlations"]
        ),
    )
    cwe_path = out_dir / "cwe_distribution.csv"
    _write_csv(
        cwe_path,
        ("language", "cwe_label", "percentage"),
        (
            [lang["language"], d["label"], f"{d['percentage']:.2f}"]
            for lang in document["languages"]
            for d in lang["cwe_distribution"]
        ),
    )
    return [episodes_path, languages_path, correlations_path, cwe_path]


# chart-data: one two-column tab-separated series per figure; sub-series are
# encoded into the label as "<language>/<detail>". Rows with absent values are
# omitted so every file is directly plot-ready.
_CHART_MEANS = (
    ("fig2_elapsed_fix_days.tsv", "mean_elapsed_fix_days"),
    ("fig3_publication_to_fix_days.tsv", "mean_publication_to_fix_days"),
    ("fig5_contributors_between.tsv", "mean_contributors"),
    ("fig6_commits_between.tsv", "mean_commits_between"),
)


def _emit_chart_data(document: Mapping, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    languages = document["languages"]

    for filename, field in _CHART_MEANS:
        path = out_dir / filename
        with path.open("w", encoding="utf-8") as fh:
            for lang in languages:
                if lang[field] is not None:
                    fh.write(f"{lang['language']}\t{lang[field]}\n")
        paths.append(path)

    path = out_dir / "fig4_severity_correlations.tsv"
    with path.open("w", encoding="utf-8") as fh:
        for lang in languages:
            for c in lang["correlations"]:
                if c["coefficient"] is not None:
                    fh.write(f"{lang['language']}/{c['pair_name']}\t{c['coefficient']}\n")
    paths.append(path)

    path = out_dir / "table1_average_total_changes.tsv"
    with path.open("w", encoding="utf-8") as fh:
        for lang in languages:
            for detail, field in (
                ("total_lines_changed", "mean_total_lines_changed"),
                ("total_files_changed", "mean_total_files_changed"),
            ):
                if lang[field] is not None:
                    fh.write(f"{lang['language']}/{detail}\t{lang[field]}\n")
    paths.append(path)

    path = out_dir / "table2_cwe_distribution.tsv"
    with path.open("w", encoding="utf-8") as fh:
        for lang in languages:
            for d in lang["cwe_distribution"]:
                fh.write(f"{lang['language']}/{d['label']}\t{d['percentage']:.2f}\n")
    paths.append(path)

    return paths


def emit_report(
    results: Sequence[ProjectResult],
    output_dir: str | Path,
    formats: Sequence[str] = ("json",),
    *,
    errors: Sequence[TargetError] = (),
    generated_at: str | None = None,
) -> dict[str, list[Path]]:
    """Write the report in each requested format; returns paths per format.

    ``json`` writes the canonical document to report.json; ``csv`` writes one
    flat table per statistic family under csv/; ``chart-data`` writes one
    two-column series per figure under chart-data/.
    """
    unknown = set(formats) - set(REPORT_FORMATS)
    if unknown:
        raise ValueError(f"unknown report formats: {sorted(unknown)}")
    document = build_document(results, errors=errors, generated_at=generated_at)
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written: dict[str, list[Path]] = {}
    if "json" in formats:
        path = output_dir / "report.json"
        path.write_text(canonical_json(document), encoding="utf-8")
        written["json"] = [path]
    if "csv" in formats:
        written["csv"] = _emit_csv(document, output_dir / "csv")
    if "chart-data" in formats:
        written["chart-data"] = _emit_chart_data(document, output_dir / "chart-data")
    return written


def load_document(path: str | Path) -> dict:
    """Read a previously emitted JSON report document."""
    with Path(path).open("r", encoding="utf-8") as fh:
        document = json.load(fh)
    if document.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"{path}: unsupported schema_version {document.get('schema_version')!r}"
        )
    return document


# JSON Schema (draft 2020-12) for the canonical report document.
_NULLABLE_NUMBER = {"type": ["number", "null"]}
_NULLABLE_INTEGER = {"type": ["integer", "null"]}

REPORT_JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "generated_at", "decisions", "projects", "languages", "errors"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "generated_at": {"type": "string"},
        "decisions": {"type": "object"},
        "projects": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["project_name", "language", "join_misses", "episodes"],
                "additionalProperties": False,
                "properties": {
                    "project_name": {"type": "string"},
                    "language": {"type": "string", "minLength": 1},
                    "join_misses": {"type": "integer", "minimum": 0},
                    "episodes": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": [
                                "cve_id",
                                "found_hash",
                                "fix_hash",
                                "mention_count",
                                "total_lines_changed",
                                "total_files_changed",
                                "elapsed_fix_days",
                                "publication_to_fix_days",
                                "contributors_between",
                                "commits_between",
                                "base_score",
                                "cwe_ids",
                                "in_store",
                            ],
                            "additionalProperties": False,
                            "properties": {
                                "cve_id": {"type": "string", "pattern": "^CVE-[0-9]{4}-[0-9]{4,7}$"},
                                "found_hash": {"type": ["string", "null"]},
                                "fix_hash": {"type": "string"},
                                "mention_count": {"type": "integer", "minimum": 1},
                                "total_lines_changed": {"type": "integer", "minimum": 0},
                                "total_files_changed": {"type": "integer", "minimum": 0},
                                "elapsed_fix_days": _NULLABLE_NUMBER,
                                "publication_to_fix_days": _NULLABLE_NUMBER,
                                "contributors_between": _NULLABLE_INTEGER,
                                "commits_between": _NULLABLE_INTEGER,
                                "base_score": _NULLABLE_NUMBER,
                                "cwe_ids": {"type": "array", "items": {"type": "string"}},
                                "in_store": {"type": "boolean"},
                            },
                        },
                    },
                },
            },
        },
        "languages": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "language",
                    "episode_count",
                    "mean_elapsed_fix_days",
                    "mean_publication_to_fix_days",
                    "mean_contributors",
                    "mean_commits_between",
                    "mean_total_lines_changed",
                    "mean_total_files_changed",
                    "correlations",
                    "cwe_distribution",
                ],
                "additionalProperties": False,
                "properties": {
                    "language": {"type": "string"},
                    "episode_count": {"type": "integer", "minimum": 0},
                    "mean_elapsed_fix_days": _NULLABLE_NUMBER,
                    "mean_publication_to_fix_days": _NULLABLE_NUMBER,
                    "mean_contributors": _NULLABLE_NUMBER,
                    "mean_commits_between": _NULLABLE_NUMBER,
                    "mean_total_lines_changed": _NULLABLE_NUMBER,
                    "mean_total_files_changed": _NULLABLE_NUMBER,
                    "correlations": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["pair_name", "coefficient", "sample_size"],
                            "additionalProperties": False,
                            "properties": {
                                "pair_name": {"enum": list(CORRELATION_PAIRS)},
                                "coefficient": {
                                    "type": ["number", "null"],
                                    "minimum": -1.0,
                                    "maximum": 1.0,
                                },
                                "sample_size": {"type": "integer", "minimum": 0},
                            },
                        },
                    },
                    "cwe_distribution": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["label", "percentage"],
                            "additionalProperties": False,
                            "properties": {
                                "label": {"type": "string"},
                                "percentage": {"type": "number", "minimum": 0.0, "maximum": 100.0},
                            },
                        },
                    },
                },
            },
        },
        "errors": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["target", "message"],
                "additionalProperties": False,
                "properties": {
                    "target": {"type": "string"},
                    "message": {"type": "string"},
                },
            },
        },
    },
}
