#!/usr/bin/env python3
"""End-to-end walkthrough on a synthetic catalog pair.

Generates two catalogs with 20 planted equivalent rule pairs plus
distractors, runs the mapping funnel, auto-accepts the survivors, diffs
the warning sets, and prints the findings report. Everything lands in a
scratch directory so the run can be inspected afterwards.

Usage: python3 scripts/run_demo.py [--out DIR] [--seed N]
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rulediff.cli import main as cli_main
from rulediff.synth import planted_pair_corpus, write_corpus_files


def run(argv: list[str]) -> None:
    print(f"$ rulediff {' '.join(argv)}")
    code = cli_main(argv)
    if code != 0:
        raise SystemExit(code)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_out", help="scratch directory")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    inputs = out / "inputs"
    inputs.mkdir(parents=True, exist_ok=True)

    corpus = planted_pair_corpus(seed=args.seed, n_planted=20, n_distractors=30)
    paths = write_corpus_files(corpus, inputs)
    print(f"wrote {len(paths)} input files to {inputs}/")

    run([
        "map",
        "--catalog-a", str(paths["catalog_a"]),
        "--catalog-b", str(paths["catalog_b"]),
        "--warnings", str(paths["warnings"]),
        "--embeddings", str(paths["embeddings"]),
        "--out-survivors", str(out / "survivors.json"),
        "--out-report", str(out / "mapping_report.json"),
    ])
    run([
        "diff",
        "--catalog-a", str(paths["catalog_a"]),
        "--catalog-b", str(paths["catalog_b"]),
        "--warnings", str(paths["warnings"]),
        "--survivors", str(out / "survivors.json"),
        "--auto-accept",
        "--out", str(out / "inconsistencies.jsonl"),
        "--out-counts", str(out / "counts.json"),
    ])

    report = out / "mapping_report.json"
    print()
    print(report.read_text())
    planted = set(corpus.planted)
    import json

    survivors = json.loads((out / "survivors.json").read_text())["pairs"]
    kept = {
        ((p["rule_a"]["tool"], p["rule_a"]["rule_id"]),
         (p["rule_b"]["tool"], p["rule_b"]["rule_id"]))
        for p in survivors
    }
    print(f"planted pairs recovered: {len(kept & planted)}/{len(planted)}")
    print(f"false survivors: {len(kept - planted)}")
    counts = json.loads((out / "counts.json").read_text())
    print(f"inconsistencies found: {counts['inconsistencies']}")
    print(f"\nartifacts in {out}/ - start the review UI with:")
    print(
        f"  python3 -m rulediff serve --survivors {out}/survivors.json "
        f"--inconsistencies {out}/inconsistencies.jsonl"
    )


if __name__ == "__main__":
    main()
