"""cvemine: mine git histories for CVE mentions and fix-lifecycle statistics."""

from .cveid import InvalidCveIdError, is_valid_cve_id, normalize_cve_id, require_cve_id
from .gitlog import (
    CommitRecord,
    GitError,
    RepoHistory,
    author_key,
    cached_extract_history,
    churn_against_predecessor,
    extract_history,
    load_history,
    save_history,
)
from .mentions import (
    FixEpisode,
    MentionTimeline,
    build_timelines,
    derive_episode,
    scan_message,
)
from .report import (
    EpisodeEntry,
    LanguageStats,
    ProjectResult,
    TargetError,
    aggregate_language,
    build_document,
    cwe_distribution,
    emit_report,
    load_document,
    make_entry,
)
from .stats import (
    CorrelationResult,
    EpisodeMetrics,
    activity_between,
    compute_metrics,
    elapsed_fix_days,
    mean,
    pearson,
    publication_to_fix_days,
)
from .store import (
    CveRecord,
    CveStore,
    FeedParseError,
    IngestResult,
    StoreVersionError,
    ingest_directory,
    parse_feed_document,
    severity_from_score,
)

__version__ = "0.1.0"
