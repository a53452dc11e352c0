"""Shared driver for end-to-end CLI replays against the committed fixture."""
from __future__ import annotations

from pathlib import Path

from rulediff.cli import main

GOLDEN = Path(__file__).parent / "fixtures" / "golden"

# every artifact the replay produces, in byte-comparison order
ARTIFACTS = (
    "survivors.json",
    "mapping_report.json",
    "inconsistencies.jsonl",
    "counts.json",
    "report.json",
    "report.txt",
    "stats_alpha.json",
    "stats_beta.json",
)


def replay_pipeline(inputs: Path, out: Path) -> None:
    """Run map, diff, report, and stats exactly as the fixture was built."""
    out.mkdir(parents=True, exist_ok=True)
    manifest = out / "manifest.json"
    rc = main([
        "map",
        "--catalog-a", str(inputs / "catalog_a.json"),
        "--catalog-b", str(inputs / "catalog_b.json"),
        "--warnings", str(inputs / "warnings.jsonl"),
        "--embeddings", str(inputs / "embeddings.txt"),
        "--out-survivors", str(out / "survivors.json"),
        "--out-report", str(out / "mapping_report.json"),
        "--manifest", str(manifest),
    ])
    assert rc == 0
    rc = main([
        "diff",
        "--catalog-a", str(inputs / "catalog_a.json"),
        "--catalog-b", str(inputs / "catalog_b.json"),
        "--survivors", str(out / "survivors.json"),
        "--warnings", str(inputs / "warnings.jsonl"),
        "--spans", str(inputs / "spans.jsonl"),
        "--granularity", str(inputs / "granularity.json"),
        "--verdicts", str(inputs / "verdicts.jsonl"),
        "--out", str(out / "inconsistencies.jsonl"),
        "--out-counts", str(out / "counts.json"),
        "--manifest", str(manifest),
    ])
    assert rc == 0
    rc = main([
        "report",
        "--survivors", str(out / "survivors.json"),
        "--inconsistencies", str(out / "inconsistencies.jsonl"),
        "--verdicts", str(inputs / "verdicts.jsonl"),
        "--out", str(out / "report.json"),
        "--text", str(out / "report.txt"),
        "--manifest", str(manifest),
    ])
    assert rc == 0
    for tool, catalog in (("alpha", "catalog_a"), ("beta", "catalog_b")):
        rc = main([
            "stats",
            "--catalog", str(inputs / f"{catalog}.json"),
            "--warnings", str(inputs / "warnings.jsonl"),
            "--out", str(out / f"stats_{tool}.json"),
            "--manifest", str(manifest),
        ])
        assert rc == 0


def compare_against_golden(out: Path) -> list[str]:
    """Names of artifacts whose bytes differ from the committed fixture."""
    mismatched = []
    for name in ARTIFACTS:
        if (out / name).read_bytes() != (GOLDEN / "expected" / name).read_bytes():
            mismatched.append(name)
    return mismatched
