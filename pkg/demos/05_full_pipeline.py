"""End-to-end pipeline walkthrough: feeds -> store -> mining -> reports.

Builds two small repositories and a feed in a temporary workspace, writes the
multi-target JSON config, runs the same code path as `cvemine mine`, and
prints the emitted report files.

    python3 demos/05_full_pipeline.py
"""
import json
import os
import subprocess
import tempfile
from pathlib import Path

from cvemine.cli import load_targets, run_pipeline
from cvemine.store import CveStore

DAY = 86400
T0 = 1583020800

FEED = {
    "CVE_data_type": "CVE",
    "CVE_Items": [
        {
            "cve": {
                "CVE_data_meta": {"ID": "CVE-2099-0001"},
                "problemtype": {"problemtype_data": [{"description": [{"value": "CWE-79"}]}]},
            },
            "impact": {"baseMetricV3": {"cvssV3": {"baseScore": 7.5, "baseSeverity": "HIGH"}}},
            "publishedDate": "2020-02-20T00:00Z",
        },
        {
            "cve": {
                "CVE_data_meta": {"ID": "CVE-2099-0002"},
                "problemtype": {"problemtype_data": [{"description": [{"value": "CWE-20"}]}]},
            },
            "impact": {"baseMetricV3": {"cvssV3": {"baseScore": 4.4, "baseSeverity": "MEDIUM"}}},
            "publishedDate": "2020-03-05T00:00Z",
        },
    ],
}


def git(repo, *args, when=None, who=("Demo", "demo@example.com")):
    env = dict(os.environ)
    if when is not None:
        name, email = who
        env.update(
            GIT_AUTHOR_NAME=name, GIT_AUTHOR_EMAIL=email, GIT_AUTHOR_DATE=f"{when} +0000",
            GIT_COMMITTER_NAME=name, GIT_COMMITTER_EMAIL=email, GIT_COMMITTER_DATE=f"{when} +0000",
        )
    subprocess.run(["git", "-C", str(repo), *args], check=True, capture_output=True, env=env)


def scripted_repo(path, commits):
    path.mkdir(parents=True)
    git(path, "-c", "init.defaultBranch=main", "init", "-q")
    git(path, "config", "user.name", "Demo")
    git(path, "config", "user.email", "demo@example.com")
    for i, (message, who, lines) in enumerate(commits):
        (path / "src.txt").write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
        git(path, "add", "-A")
        git(path, "commit", "-q", "-m", message, when=T0 + i * 3 * DAY, who=who)


def main():
    with tempfile.TemporaryDirectory() as workdir:
        base = Path(workdir)

        scripted_repo(
            base / "service",
            [
                ("note CVE-2099-0001 in input handling", ("Ada", "ada@example.com"), ["v1-a", "v1-b"]),
                ("harden parser", ("Ben", "ben@example.com"), ["v1-a", "v1-b", "v2-c"]),
                ("fix CVE-2099-0001 properly", ("Cay", "cay@example.com"), ["v1-a", "v1-b", "v2-c", "v3-d"]),
            ],
        )
        scripted_repo(
            base / "tooling",
            [
                ("initial import", ("Dee", "dee@example.com"), ["t-1", "t-2", "t-3"]),
                ("resolve CVE-2099-0002", ("Eli", "eli@example.com"), ["t-1", "t-2", "t-3", "t-4", "t-5"]),
            ],
        )

        feeds_dir = base / "feeds"
        feeds_dir.mkdir()
        (feeds_dir / "demo.json").write_text(json.dumps(FEED), encoding="utf-8")

        config_path = base / "targets.json"
        config_path.write_text(
            json.dumps(
                {
                    "targets": [
                        {"name": "service", "source": str(base / "service"), "language": "python"},
                        {"name": "tooling", "source": str(base / "tooling"), "language": "go"},
                    ],
                    "store_dir": str(base / "nvd-store"),
                    "repos_dir": str(base / "repos"),
                    "output_dir": str(base / "reports"),
                },
                indent=2,
            ),
            encoding="utf-8",
        )
        print(f"config:\n{config_path.read_text()}")

        with CveStore(base / "nvd-store") as store:
            result = store.ingest_path(feeds_dir / "demo.json")
            print(f"ingested {result.ingested} records")

        outcome = run_pipeline(load_targets(config_path), formats=("json", "csv", "chart-data"))
        print(f"\npipeline exit code: {outcome.exit_code}")
        for fmt, paths in outcome.written.items():
            for p in paths:
                print(f"  {fmt}: {p.relative_to(base)}")

        document = json.loads((base / "reports" / "report.json").read_text(encoding="utf-8"))
        print("\nper-language aggregates from report.json:")
        for language in document["languages"]:
            print(
                f"  {language['language']}: {language['episode_count']} episode(s), "
                f"mean elapsed {language['mean_elapsed_fix_days']} days, "
                f"CWE shares {[(d['label'], d['percentage']) for d in language['cwe_distribution']]}"
            )

        chart = (base / "reports" / "chart-data" / "fig2_elapsed_fix_days.tsv").read_text()
        print(f"\nchart-data/fig2_elapsed_fix_days.tsv:\n{chart}")


if __name__ == "__main__":
    main()
