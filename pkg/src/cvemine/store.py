"""Local CVE store: NVD JSON feed ingestion and id-keyed lookup.

Feeds are the per-year NVD 1.1 JSON documents. Ingestion upserts every item
into an embedded SQLite database kept in a configurable directory (default
``./nvd-store``), so the rest of the pipeline can resolve publication dates,
CVSS scores, and CWE groups without any external service. The store file
carries a format-version marker and survives process restarts; ingestion is
single-writer, after which concurrent readers are safe (one ``CveStore``
instance per thread).
"""
from __future__ import annotations

import gzip
import json
import sqlite3
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Mapping, NamedTuple

from .cveid import CANONICAL_CVE_RE, InvalidCveIdError, require_cve_id

STORE_FORMAT_VERSION = 1
STORE_FILENAME = "cve-store.sqlite3"
DEFAULT_STORE_DIR = "./nvd-store"

# CVSS v3.x rating bands, also applied to v2 scores when no v3 metric exists.
_SEVERITY_BANDS = (
    (0.0, "NONE"),
    (3.9, "LOW"),
    (6.9, "MEDIUM"),
    (8.9, "HIGH"),
    (10.0, "CRITICAL"),
)

SEVERITY_LABELS = ("NONE", "LOW", "MEDIUM", "HIGH", "CRITICAL")


def severity_from_score(score: float) -> str:
    """Map a base score in [0, 10] to its rating band label."""
    if score == 0.0:
        return "NONE"
    if score <= 3.9:
        return "LOW"
    if score <= 6.9:
        return "MEDIUM"
    if score <= 8.9:
        return "HIGH"
    return "CRITICAL"


class FeedParseError(ValueError):
    """A feed document is structurally malformed.

    ``item_index`` names the offending CVE item when the problem is local to
    one item; it is None for document-level problems.
    """

    def __init__(self, reason: str, *, item_index: int | None = None, feed_name: str | None = None):
        where = f"{feed_name or '<feed>'}"
        if item_index is not None:
            where += f", item {item_index}"
        super().__init__(f"{where}: {reason}")
        self.reason = reason
        self.item_index = item_index
        self.feed_name = feed_name


class StoreVersionError(RuntimeError):
    """The on-disk store was written with an incompatible format version."""


class IngestResult(NamedTuple):
    ingested: int
    skipped: int


class FeedLogEntry(NamedTuple):
    feed_name: str
    record_count: int
    ingested_at: str


@dataclass(frozen=True)
class CveRecord:
    """One vulnerability database entry.

    ``published`` is a UTC unix timestamp in seconds. ``base_score`` and
    ``severity`` are None when the feed entry carries no metrics (rejected or
    reserved entries are still ingested so mined mentions can join on them).
    """

    id: str
    published: int | None = None
    base_score: float | None = None
    severity: str | None = None
    cwe_ids: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not CANONICAL_CVE_RE.fullmatch(self.id) or self.id != self.id.upper():
            raise ValueError(f"id not in canonical form: {self.id!r}")
        if int(self.id.split("-")[1]) < 1999:
            raise ValueError(f"CVE year precedes 1999: {self.id!r}")
        if self.base_score is not None and not 0.0 <= self.base_score <= 10.0:
            raise ValueError(f"base_score out of range: {self.base_score!r}")
        if self.severity is not None and self.severity not in SEVERITY_LABELS:
            raise ValueError(f"unknown severity label: {self.severity!r}")
        if len(set(self.cwe_ids)) != len(self.cwe_ids):
            raise ValueError(f"duplicate CWE labels for {self.id}: {self.cwe_ids!r}")
        object.__setattr__(self, "cwe_ids", tuple(self.cwe_ids))


def _parse_utc_timestamp(text: str) -> int:
    """Parse an ISO-8601 timestamp (NVD style, e.g. '2020-01-01T00:00Z') to unix seconds."""
    cleaned = text.strip()
    if cleaned.endswith("Z"):
        cleaned = cleaned[:-1] + "+00:00"
    moment = datetime.fromisoformat(cleaned)
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return int(moment.timestamp())


def _score_and_severity(impact: Mapping[str, Any]) -> tuple[float | None, str | None]:
    # Prefer the v3 metric; fall back to v2 with severity derived from the band map.
    v3 = impact.get("baseMetricV3", {}).get("cvssV3", {})
    if "baseScore" in v3:
        score = float(v3["baseScore"])
        severity = v3.get("baseSeverity") or severity_from_score(score)
        return score, str(severity).upper()
    v2 = impact.get("baseMetricV2", {}).get("cvssV2", {})
    if "baseScore" in v2:
        score = float(v2["baseScore"])
        return score, severity_from_score(score)
    return None, None


def _cwe_labels(cve_obj: Mapping[str, Any]) -> tuple[str, ...]:
    labels: list[str] = []
    for problemtype in cve_obj.get("problemtype", {}).get("problemtype_data", []):
        for description in problemtype.get("description", []):
            value = description.get("value")
            if value and value not in labels:
                labels.append(value)
    return tuple(labels)


def _record_from_item(item: Mapping[str, Any], index: int, feed_name: str | None) -> CveRecord | None:
    """Build a CveRecord from one feed item; None means the item is skipped."""
    if not isinstance(item, Mapping):
        raise FeedParseError("item is not an object", item_index=index, feed_name=feed_name)
    cve_obj = item.get("cve") or {}
    if not isinstance(cve_obj, Mapping):
        raise FeedParseError("'cve' field is not an object", item_index=index, feed_name=feed_name)
    meta = cve_obj.get("CVE_data_meta") or {}
    raw_id = meta.get("ID") if isinstance(meta, Mapping) else None
    if not isinstance(raw_id, str):
        return None
    try:
        cve_id = require_cve_id(raw_id)
    except InvalidCveIdError:
        return None
    if int(cve_id.split("-")[1]) < 1999:
        return None  # un-ingestable id, tallied with the missing-id skips
    published: int | None = None
    published_raw = item.get("publishedDate")
    if published_raw is not None:
        try:
            published = _parse_utc_timestamp(str(published_raw))
        except ValueError:
            raise FeedParseError(
                f"unparseable publishedDate {published_raw!r}", item_index=index, feed_name=feed_name
            ) from None
    try:
        score, severity = _score_and_severity(item.get("impact") or {})
        return CveRecord(
            id=cve_id,
            published=published,
            base_score=score,
            severity=severity,
            cwe_ids=_cwe_labels(cve_obj),
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise FeedParseError(str(exc), item_index=index, feed_name=feed_name) from exc


def parse_feed_document(
    document: Mapping[str, Any], feed_name: str | None = None
) -> tuple[list[CveRecord], int]:
    """Parse a feed document into records plus a skip tally.

    Items without a usable CVE id are skipped and tallied; any other
    structural defect raises FeedParseError naming the offending item index.
    Within one document a later item overwrites an earlier one with the same
    id (last wins).
    """
    if not isinstance(document, Mapping):
        raise FeedParseError("document is not a JSON object", feed_name=feed_name)
    items = document.get("CVE_Items")
    if not isinstance(items, list):
        raise FeedParseError("missing CVE_Items list", feed_name=feed_name)
    by_id: dict[str, CveRecord] = {}
    skipped = 0
    for index, item in enumerate(items):
        record = _record_from_item(item, index, feed_name)
        if record is None:
            skipped += 1
            continue
        by_id[record.id] = record
    return list(by_id.values()), skipped


def _load_feed_file(path: Path) -> Any:
    raw = path.read_bytes()
    if raw[:2] == b"\x1f\x8b":
        try:
            raw = gzip.decompress(raw)
        except (OSError, EOFError) as exc:
            raise FeedParseError(f"broken gzip stream: {exc}", feed_name=path.name) from exc
    try:
        return json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FeedParseError(f"not a JSON document: {exc}", feed_name=path.name) from exc


class CveStore:
    """SQLite-backed store of CveRecords keyed by canonical id.

    One instance wraps one connection and must stay on its creating thread;
    concurrent readers each open their own instance on the same directory.
    """

    def __init__(self, directory: str | Path = DEFAULT_STORE_DIR):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path = self.directory / STORE_FILENAME
        self._conn = sqlite3.connect(self.path)
        self._init_schema()

    def _init_schema(self) -> None:
        with self._conn:
            self._conn.execute("CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL)")
            row = self._conn.execute("SELECT value FROM meta WHERE key = 'format_version'").fetchone()
            if row is None:
                self._conn.execute(
                    "INSERT INTO meta (key, value) VALUES ('format_version', ?)",
                    (str(STORE_FORMAT_VERSION),),
                )
            elif int(row[0]) != STORE_FORMAT_VERSION:
                raise StoreVersionError(
                    f"store at {self.path} has format version {row[0]}, expected {STORE_FORMAT_VERSION}"
                )
            self._conn.execute(
                """
                CREATE TABLE IF NOT EXISTS records (
                    id TEXT PRIMARY KEY,
                    published INTEGER,
                    base_score REAL,
                    severity TEXT,
                    cwe_ids TEXT NOT NULL
                )
                """
            )
            self._conn.execute(
                """
                CREATE TABLE IF NOT EXISTS feed_log (
                    feed_name TEXT PRIMARY KEY,
                    record_count INTEGER NOT NULL,
                    ingested_at TEXT NOT NULL
                )
                """
            )

    def close(self) -> None:
        self._conn.close()

    def __enter__(self) -> "CveStore":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    # -- ingestion ---------------------------------------------------------

    def ingest_feed(self, document: Mapping[str, Any], feed_name: str = "<inline>") -> IngestResult:
        """Upsert every item of a parsed feed document; returns (ingested, skipped).

        The document is parsed completely before any write, so a parse error
        leaves the store untouched. Re-ingesting the same feed is idempotent
        over the record dump; later feeds overwrite earlier records sharing an
        id.
        """
        records, skipped = parse_feed_document(document, feed_name)
        now = datetime.now(timezone.utc).isoformat(timespec="seconds")
        with self._conn:
            self._conn.executemany(
                """
                INSERT INTO records (id, published, base_score, severity, cwe_ids)
                VALUES (?, ?, ?, ?, ?)
                ON CONFLICT(id) DO UPDATE SET
                    published = excluded.published,
                    base_score = excluded.base_score,
                    severity = excluded.severity,
                    cwe_ids = excluded.cwe_ids
                """,
                [
                    (r.id, r.published, r.base_score, r.severity, json.dumps(list(r.cwe_ids)))
                    for r in records
                ],
            )
            self._conn.execute(
                """
                INSERT INTO feed_log (feed_name, record_count, ingested_at) VALUES (?, ?, ?)
                ON CONFLICT(feed_name) DO UPDATE SET
                    record_count = excluded.record_count, ingested_at = excluded.ingested_at
                """,
                (feed_name, len(records), now),
            )
        return IngestResult(ingested=len(records), skipped=skipped)

    def ingest_path(self, path: str | Path) -> IngestResult:
        """Ingest one feed file (.json or .json.gz) from disk."""
        path = Path(path)
        return self.ingest_feed(_load_feed_file(path), feed_name=path.name)

    # -- lookups -----------------------------------------------------------

    def lookup(self, cve_id: str) -> CveRecord | None:
        """Return the stored record, or None when absent.

        Matching is case-insensitive over the id; a pattern-invalid id raises
        InvalidCveIdError rather than reporting absence.
        """
        canonical = require_cve_id(cve_id)
        row = self._conn.execute(
            "SELECT id, published, base_score, severity, cwe_ids FROM records WHERE id = ?",
            (canonical,),
        ).fetchone()
        return self._record_from_row(row) if row else None

    def cwe_of(self, cve_id: str) -> list[str]:
        """CWE group labels of a CVE, in feed order; empty for absent records."""
        record = self.lookup(cve_id)
        return list(record.cwe_ids) if record else []

    def record_count(self) -> int:
        return self._conn.execute("SELECT COUNT(*) FROM records").fetchone()[0]

    def dump_records(self) -> list[CveRecord]:
        """All records ordered by id; the canonical store state for comparisons."""
        rows = self._conn.execute(
            "SELECT id, published, base_score, severity, cwe_ids FROM records ORDER BY id"
        ).fetchall()
        return [self._record_from_row(row) for row in rows]

    def ingested_feeds(self) -> list[FeedLogEntry]:
        rows = self._conn.execute(
            "SELECT feed_name, record_count, ingested_at FROM feed_log ORDER BY feed_name"
        ).fetchall()
        return [FeedLogEntry(*row) for row in rows]

    @staticmethod
    def _record_from_row(row: Iterable[Any]) -> CveRecord:
        cve_id, published, base_score, severity, cwe_json = row
        return CveRecord(
            id=cve_id,
            published=published,
            base_score=base_score,
            severity=severity,
            cwe_ids=tuple(json.loads(cwe_json)),
        )


def ingest_directory(store: CveStore, feeds_dir: str | Path) -> IngestResult:
    """Ingest every feed file under a directory, in name order."""
    feeds_dir = Path(feeds_dir)
    paths = sorted(
        p for p in feeds_dir.iterdir() if p.suffix == ".json" or p.name.endswith(".json.gz")
    )
    if not paths:
        raise FileNotFoundError(f"no .json or .json.gz feed files in {feeds_dir}")
    total = IngestResult(0, 0)
    for path in paths:
        result = store.ingest_path(path)
        total = IngestResult(total.ingested + result.ingested, total.skipped + result.skipped)
    return total
