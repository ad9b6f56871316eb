"""Feed ingestion walkthrough: load an NVD-style feed and query the store.

Builds a three-entry feed document in a temporary directory, ingests it, and
shows lookups, severity banding, and the idempotence of re-ingestion.

    python3 demos/01_feed_store.py
"""
import tempfile
from pathlib import Path

from cvemine import CveStore, severity_from_score

FEED = {
    "CVE_data_type": "CVE",
    "CVE_Items": [
        {
            "cve": {
                "CVE_data_meta": {"ID": "CVE-2099-0001"},
                "problemtype": {"problemtype_data": [{"description": [{"value": "CWE-79"}]}]},
            },
            "impact": {"baseMetricV3": {"cvssV3": {"baseScore": 7.5, "baseSeverity": "HIGH"}}},
            "publishedDate": "2020-01-03T00:00Z",
        },
        {
            "cve": {
                "CVE_data_meta": {"ID": "CVE-2099-0002"},
                "problemtype": {
                    "problemtype_data": [
                        {"description": [{"value": "CWE-119"}]},
                        {"description": [{"value": "CWE-20"}]},
                    ]
                },
            },
            # v2-only entry: the severity label comes from the band mapping
            "impact": {"baseMetricV2": {"cvssV2": {"baseScore": 10.0}}},
            "publishedDate": "2020-02-14T00:00Z",
        },
        {
            # reserved entry with no metrics at all: kept so mined mentions can join
            "cve": {"CVE_data_meta": {"ID": "CVE-2099-0003"}, "problemtype": {"problemtype_data": []}},
            "impact": {},
        },
    ],
}


def main():
    with tempfile.TemporaryDirectory() as workdir:
        store_dir = Path(workdir) / "nvd-store"
        store = CveStore(store_dir)

        result = store.ingest_feed(FEED, feed_name="demo-feed")
        print(f"ingested {result.ingested} records into {store.path} ({result.skipped} skipped)")

        print("\nlookups are case-insensitive and never fabricate fields:")
        for cve_id in ("cve-2099-0001", "CVE-2099-0002", "CVE-2099-0003", "CVE-2099-9999"):
            record = store.lookup(cve_id)
            if record is None:
                print(f"  {cve_id:>14}: absent")
            else:
                print(
                    f"  {cve_id:>14}: published={record.published} score={record.base_score} "
                    f"severity={record.severity} cwes={list(record.cwe_ids)}"
                )

        print("\nthe CVSS rating bands used when a feed entry has no v3 label:")
        for score in (0.0, 2.5, 5.0, 8.0, 9.9):
            print(f"  {score:4} -> {severity_from_score(score)}")

        store.ingest_feed(FEED, feed_name="demo-feed")
        print(f"\nre-ingestion is idempotent: still {store.record_count()} records")
        print("feed log:", [tuple(f)[:2] for f in store.ingested_feeds()])
        store.close()


if __name__ == "__main__":
    main()
