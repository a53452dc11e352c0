#!/usr/bin/env python3
"""Regenerate the committed end-to-end fixture.

Builds a small deterministic corpus (two 12-rule catalogs, ~400 warnings,
toy embeddings, method spans, a granularity config), runs the full CLI
pipeline over it, and freezes both the inputs and every output under
tests/fixtures/golden/. The byte-exact regression test replays the same
commands and compares bytes, so run this script only when an output format
deliberately changes, and commit the result.
"""
from __future__ import annotations

import json
import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from rulediff.catalog import CodeExample, RuleCatalog, RuleDescriptor, save_catalog
from rulediff.cli import main
from rulediff.jsonio import dump_jsonl, load_jsonl
from rulediff.synth import toy_embedding_model
from rulediff.warnstore import MethodSpan, WarningRecord

GOLDEN = REPO / "tests" / "fixtures" / "golden"
TS = "2026-03-01T12:00:00+00:00"

THEMES = [
    ("null", "dereference", "crash"),
    ("array", "index", "bounds"),
    ("resource", "leak", "close"),
    ("string", "concat", "loop"),
    ("equals", "hashcode", "contract"),
    ("thread", "lock", "deadlock"),
    ("cast", "unchecked", "generic"),
    ("exception", "swallow", "catch"),
]


def rule(tool, rule_id, words, example=None):
    examples = ()
    if example:
        examples = (CodeExample(kind="noncompliant", source_text=example),)
    return RuleDescriptor(
        tool_id=tool,
        rule_id=rule_id,
        title=f"{words[0].title()} {words[1]} rule",
        description=" ".join(words) + f" reported by {tool}",
        code_examples=examples,
    )


def build_inputs(inputs: Path) -> None:
    rng = random.Random(2026)
    rules_a, rules_b, records = [], [], []
    span_entries = []
    granularity_rules = {}

    # eight themed pairs that should survive, four noise rules per side
    for i, theme in enumerate(THEMES):
        aid, bid = f"SA{i:02d}", f"SB{i:02d}"
        example = (
            f"class {theme[0].title()}{theme[1].title()}Check {{ "
            f"void scan() {{ int {theme[2]}Count = 0; }} }}"
        )
        rules_a.append(rule("alpha", aid, list(theme), example))
        rules_b.append(rule("beta", bid, list(theme) + ["detector"], example))
        files = [f"src/t{i:02d}/Main.java", f"src/t{i:02d}/Util.java"]
        shared = 12 + (i % 5) * 3
        for j in range(shared):
            file = files[j % 2]
            line = 10 + j * 7
            records.append(
                WarningRecord("alpha", aid, "demo", file, line, line)
            )
            records.append(
                WarningRecord("beta", bid, "demo", file, line, line)
            )
        # one extra alpha-only warning per theme: line-level disagreements
        records.append(
            WarningRecord("alpha", aid, "demo", files[0], 500 + i, 500 + i)
        )

    # two method-granular pairs: one side warns whole methods
    for k in range(2):
        aid, bid = f"MA{k}", f"MB{k}"
        words = ["method", "return", f"topic{k}"]
        rules_a.append(rule("alpha", aid, words))
        rules_b.append(rule("beta", bid, words + ["checker"]))
        granularity_rules[f"alpha:{aid}"] = "method"
        file = f"src/methods/Case{k}.java"
        methods = [
            MethodSpan(name=f"case{k}m{m}", start=30 * m + 1, end=30 * m + 20)
            for m in range(12)
        ]
        span_entries.append(
            {
                "project": "demo",
                "file": file,
                "methods": [m.to_obj() for m in methods],
            }
        )
        for m, span in enumerate(methods):
            if m % 3 == 2:
                # beta-only method: a seeded inconsistency
                records.append(
                    WarningRecord(
                        "beta", bid, "demo", file,
                        span.start + 2, span.start + 2,
                    )
                )
                continue
            records.append(
                WarningRecord(
                    "alpha", aid, "demo", file, span.start, span.end,
                    method_span=span,
                )
            )
            records.append(
                WarningRecord(
                    "beta", bid, "demo", file,
                    span.start + (m % 5), span.start + (m % 5),
                )
            )

    # noise rules: triggered in disjoint files so stage d prunes any pairing
    for side, prefix, bucket in (("alpha", "NA", rules_a), ("beta", "NB", rules_b)):
        for k in range(2):
            rid = f"{prefix}{k}"
            words = [f"noise{k}", "shared", "wording"]
            bucket.append(rule(side, rid, words))
            for j in range(3 + k):
                line = rng.randint(1, 400)
                records.append(
                    WarningRecord(
                        side, rid, "demo",
                        f"src/noise/{side}{k}_{j}.java", line, line,
                    )
                )

    catalog_a = RuleCatalog(tool_id="alpha", rules=rules_a)
    catalog_b = RuleCatalog(tool_id="beta", rules=rules_b)
    assert len(catalog_a) == 12 and len(catalog_b) == 12

    vocab = sorted({w for r in rules_a + rules_b for w in r.text.lower().split()})
    model = toy_embedding_model(vocab, dim=20, seed=7)

    inputs.mkdir(parents=True, exist_ok=True)
    save_catalog(catalog_a, inputs / "catalog_a.json")
    save_catalog(catalog_b, inputs / "catalog_b.json")
    dump_jsonl([r.to_obj() for r in records], inputs / "warnings.jsonl")
    model.save_word2vec(inputs / "embeddings.txt")
    dump_jsonl(span_entries, inputs / "spans.jsonl")
    (inputs / "granularity.json").write_text(
        json.dumps({"default": "line", "rules": granularity_rules}, indent=2,
                   sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"inputs: {len(records)} warnings, {len(vocab)} embedding words")


def run_pipeline(inputs: Path, expected: Path, scratch: Path) -> None:
    expected.mkdir(parents=True, exist_ok=True)
    manifest = scratch / "manifest.json"

    rc = main([
        "map",
        "--catalog-a", str(inputs / "catalog_a.json"),
        "--catalog-b", str(inputs / "catalog_b.json"),
        "--warnings", str(inputs / "warnings.jsonl"),
        "--embeddings", str(inputs / "embeddings.txt"),
        "--out-survivors", str(expected / "survivors.json"),
        "--out-report", str(expected / "mapping_report.json"),
        "--manifest", str(manifest),
    ])
    assert rc == 0, "map failed"

    survivors = json.loads((expected / "survivors.json").read_text())["pairs"]
    verdicts = []
    for n, pair in enumerate(survivors):
        verdict = "reject" if n == len(survivors) - 1 else "accept"
        for reviewer in ("alice", "bob"):
            verdicts.append({
                "subject": pair["id"], "reviewer": reviewer,
                "verdict": verdict, "pattern": None, "note": "", "ts": TS,
            })
    verdict_path = inputs / "verdicts.jsonl"
    dump_jsonl(verdicts, verdict_path)

    rc = main([
        "diff",
        "--catalog-a", str(inputs / "catalog_a.json"),
        "--catalog-b", str(inputs / "catalog_b.json"),
        "--survivors", str(expected / "survivors.json"),
        "--warnings", str(inputs / "warnings.jsonl"),
        "--spans", str(inputs / "spans.jsonl"),
        "--granularity", str(inputs / "granularity.json"),
        "--verdicts", str(verdict_path),
        "--out", str(expected / "inconsistencies.jsonl"),
        "--out-counts", str(expected / "counts.json"),
        "--manifest", str(manifest),
    ])
    assert rc == 0, "diff failed"

    # label a few inconsistencies, both reviewers agreeing
    incs = load_jsonl(expected / "inconsistencies.jsonl")
    labels = [
        ("false_positive", "P12"),
        ("false_positive", "P12"),
        ("false_negative_impl", "P3"),
        ("not_a_bug", None),
    ]
    for inc, (verdict, pattern) in zip(incs, labels):
        for reviewer in ("alice", "bob"):
            verdicts.append({
                "subject": inc["id"], "reviewer": reviewer,
                "verdict": verdict, "pattern": pattern, "note": "", "ts": TS,
            })
    dump_jsonl(verdicts, verdict_path)

    rc = main([
        "report",
        "--survivors", str(expected / "survivors.json"),
        "--inconsistencies", str(expected / "inconsistencies.jsonl"),
        "--verdicts", str(verdict_path),
        "--out", str(expected / "report.json"),
        "--text", str(expected / "report.txt"),
        "--manifest", str(manifest),
    ])
    assert rc == 0, "report failed"

    for tool, catalog in (("alpha", "catalog_a"), ("beta", "catalog_b")):
        rc = main([
            "stats",
            "--catalog", str(inputs / f"{catalog}.json"),
            "--warnings", str(inputs / "warnings.jsonl"),
            "--out", str(expected / f"stats_{tool}.json"),
            "--manifest", str(manifest),
        ])
        assert rc == 0, f"stats {tool} failed"

    report = json.loads((expected / "report.json").read_text())
    print(
        f"expected outputs: {len(survivors)} survivors, "
        f"{len(incs)} inconsistencies, "
        f"{len(report['confirmed_pairs'])} confirmed pairs"
    )


if __name__ == "__main__":
    import tempfile

    build_inputs(GOLDEN / "inputs")
    with tempfile.TemporaryDirectory() as scratch:
        run_pipeline(GOLDEN / "inputs", GOLDEN / "expected", Path(scratch))
    print(f"fixture written under {GOLDEN}")
