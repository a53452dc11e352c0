"""Synthetic corpora with known ground truth.

These generators build catalog pairs, warning sets, and toy embeddings for
exercising the mapping funnel and the diff engine at desk scale. They are
deterministic for a given seed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import CodeExample, RuleCatalog, RuleDescriptor, RuleKey
from .jsonio import dump_jsonl
from .mapper import PairKey
from .similarity import EmbeddingModel
from .warnstore import MethodSpan, WarningRecord


def toy_embedding_model(words, dim: int = 16, seed: int = 0) -> EmbeddingModel:
    """Deterministic random unit-range vectors for the given vocabulary."""
    rng = random.Random(seed)
    vectors = {}
    for word in sorted(set(words)):
        vectors[word] = [rng.uniform(-1.0, 1.0) for _ in range(dim)]
    return EmbeddingModel(dim=dim, vectors=vectors)


@dataclass
class SyntheticCorpus:
    catalog_a: RuleCatalog
    catalog_b: RuleCatalog
    records: list[WarningRecord]
    model: EmbeddingModel
    planted: list[PairKey] = field(default_factory=list)


def _rule(tool, rule_id, title_words, desc_words, example: str | None = None):
    examples = ()
    if example:
        examples = (CodeExample(kind="noncompliant", source_text=example),)
    return RuleDescriptor(
        tool_id=tool,
        rule_id=rule_id,
        title=" ".join(title_words),
        description=" ".join(desc_words),
        code_examples=examples,
    )


def planted_pair_corpus(
    seed: int = 0,
    n_planted: int = 20,
    n_distractors: int = 30,
    dim: int = 16,
) -> SyntheticCorpus:
    """Two catalogs with known true pairs.

    Each planted pair shares a private term profile and warns on nearly the
    same lines (mutual overlap >= 0.85, trigger counts within a small
    factor, identical warned-file sets, both counts above 10). Distractor
    rules draw their text from shared clusters, so the similarity stage
    produces candidates among them, but their warnings live in per-rule
    files, leaving zero file overlap for the funnel to prune.
    """
    rng = random.Random(seed)
    fillers = [f"fill{j}" for j in range(12)]
    project = "proj"

    rules_a: list[RuleDescriptor] = []
    rules_b: list[RuleDescriptor] = []
    records: list[WarningRecord] = []
    planted: list[PairKey] = []
    vocabulary: set[str] = set(fillers)

    for i in range(n_planted):
        theme = [f"theme{i:02d}w{j}" for j in range(8)]
        vocabulary.update(theme)
        example = (
            f"class Theme{i:02d}Checker {{ void run() {{ "
            f"theme{i:02d}Helper(); }} }}"
        )
        rules_a.append(
            _rule(
                "alpha",
                f"A{i:03d}",
                theme[:2],
                theme + rng.sample(fillers, 2),
                example,
            )
        )
        rules_b.append(
            _rule(
                "beta",
                f"B{i:03d}",
                theme[2:4],
                theme[:6] + rng.sample(fillers, 2),
                example,
            )
        )
        planted.append((("alpha", f"A{i:03d}"), ("beta", f"B{i:03d}")))

        files = [f"src/pair{i:02d}/file{j}.java" for j in range(3)]
        shared = 16 + (i % 9)
        for t in range(shared):
            file = files[t % 3]
            line = 10 + 2 * (t // 3)
            for tool, rule_id in (("alpha", f"A{i:03d}"), ("beta", f"B{i:03d}")):
                records.append(
                    WarningRecord(
                        tool_id=tool,
                        rule_id=rule_id,
                        project_id=project,
                        file_path=file,
                        start_line=line,
                        end_line=line,
                    )
                )
        # Extras keep the overlap mutual but below 1.0 on both sides; they
        # stay inside the pair's own files so the file sets match exactly.
        for extra_line in (501, 503):
            records.append(
                WarningRecord(
                    tool_id="alpha",
                    rule_id=f"A{i:03d}",
                    project_id=project,
                    file_path=files[0],
                    start_line=extra_line,
                    end_line=extra_line,
                )
            )
        records.append(
            WarningRecord(
                tool_id="beta",
                rule_id=f"B{i:03d}",
                project_id=project,
                file_path=files[1],
                start_line=601,
                end_line=601,
            )
        )

    n_clusters = 6
    cluster_words = {
        c: [f"noise{c}w{j}" for j in range(8)] for c in range(n_clusters)
    }
    for words in cluster_words.values():
        vocabulary.update(words)
    for k in range(n_distractors):
        cluster = k % n_clusters
        words = cluster_words[cluster]
        for tool, prefix in (("alpha", "AD"), ("beta", "BD")):
            rule_id = f"{prefix}{k:03d}"
            rules = rules_a if tool == "alpha" else rules_b
            rules.append(
                _rule(
                    tool,
                    rule_id,
                    rng.sample(words, 2),
                    rng.sample(words, 6) + rng.sample(fillers, 2),
                    f"class Noise{tool.title()}{k} {{ void check{k}() {{ }} }}",
                )
            )
            count = 3 + (k * 7 + (0 if tool == "alpha" else 3)) % 15
            for t in range(count):
                records.append(
                    WarningRecord(
                        tool_id=tool,
                        rule_id=rule_id,
                        project_id=project,
                        file_path=f"src/noise/{tool}{k:02d}.java",
                        start_line=t + 1,
                        end_line=t + 1,
                    )
                )

    model = toy_embedding_model(sorted(vocabulary), dim=dim, seed=seed + 1)
    return SyntheticCorpus(
        catalog_a=RuleCatalog(tool_id="alpha", rules=rules_a),
        catalog_b=RuleCatalog(tool_id="beta", rules=rules_b),
        records=records,
        model=model,
        planted=planted,
    )


def random_mapping_corpus(seed: int) -> SyntheticCorpus:
    """A loosely structured corpus for property checks on the funnel.

    Rule texts draw from one shared vocabulary and warnings land in a shared
    file pool, so overlaps of every size occur; some rules never trigger.
    """
    rng = random.Random(seed)
    vocab = [f"word{j:02d}" for j in range(30)]
    file_pool = [f"f{j}.java" for j in range(12)]
    project = f"proj{rng.randint(0, 2)}"

    def make_rules(tool: str, prefix: str) -> list[RuleDescriptor]:
        rules = []
        for i in range(rng.randint(6, 14)):
            example = None
            if rng.random() < 0.5:
                word = rng.choice(vocab)
                example = f"class {word.title()}Check {{ void apply() {{ }} }}"
            rules.append(
                _rule(
                    tool,
                    f"{prefix}{i:03d}",
                    rng.sample(vocab, 2),
                    [rng.choice(vocab) for _ in range(rng.randint(4, 10))],
                    example,
                )
            )
        return rules

    rules_a = make_rules("alpha", "RA")
    rules_b = make_rules("beta", "RB")
    records: list[WarningRecord] = []
    for rule in rules_a + rules_b:
        if rng.random() < 0.25:
            continue  # untriggered rule
        for _ in range(rng.randint(1, 40)):
            start = rng.randint(1, 60)
            records.append(
                WarningRecord(
                    tool_id=rule.tool_id,
                    rule_id=rule.rule_id,
                    project_id=project,
                    file_path=rng.choice(file_pool),
                    start_line=start,
                    end_line=start + rng.choice((0, 0, 0, 1, 2)),
                )
            )
    model = toy_embedding_model(vocab, dim=12, seed=seed + 17)
    return SyntheticCorpus(
        catalog_a=RuleCatalog(tool_id="alpha", rules=rules_a),
        catalog_b=RuleCatalog(tool_id="beta", rules=rules_b),
        records=records,
        model=model,
    )


@dataclass
class DiffCorpus:
    catalog_a: RuleCatalog
    catalog_b: RuleCatalog
    records: list[WarningRecord]
    span_entries: list[dict]
    rule_a: RuleKey
    rule_b: RuleKey
    # (project, file, location, warned_by); location is a line number or a
    # (start, end) method extent.
    expected: list[tuple]


def _diff_catalogs() -> tuple[RuleCatalog, RuleCatalog]:
    a = RuleCatalog(
        tool_id="alpha",
        rules=[_rule("alpha", "LA", ["check", "thing"], ["alpha", "side", "rule"])],
    )
    b = RuleCatalog(
        tool_id="beta",
        rules=[_rule("beta", "LB", ["check", "thing"], ["beta", "side", "rule"])],
    )
    return a, b


def line_diff_corpus(
    seed: int, n_coincident: int = 40, n_onesided: int = 12
) -> DiffCorpus:
    """One confirmed pair at line granularity.

    Coincident slots warn the same expanded line sets on both sides (the
    record shapes may differ); one-sided slots produce exactly one expected
    inconsistency each. Slots occupy disjoint line blocks, so the expected
    set is exact.
    """
    rng = random.Random(seed)
    catalog_a, catalog_b = _diff_catalogs()
    project = "proj"
    files = [f"d{j}.java" for j in range(8)]
    records: list[WarningRecord] = []
    expected: list[tuple] = []
    slot = 0

    def block():
        nonlocal slot
        base = 10 * slot + 1
        slot += 1
        return rng.choice(files), base

    for _ in range(n_coincident):
        file, base = block()
        spread = rng.choice((0, 1, 2))
        records.append(
            WarningRecord("alpha", "LA", project, file, base, base + spread)
        )
        # The other side covers the same lines with single-line records.
        for line in range(base, base + spread + 1):
            records.append(WarningRecord("beta", "LB", project, file, line, line))
    for _ in range(n_onesided):
        file, base = block()
        warned_by = rng.choice(("side_a_only", "side_b_only"))
        tool, rule_id = ("alpha", "LA") if warned_by == "side_a_only" else ("beta", "LB")
        records.append(WarningRecord(tool, rule_id, project, file, base, base))
        expected.append((project, file, base, warned_by))

    return DiffCorpus(
        catalog_a=catalog_a,
        catalog_b=catalog_b,
        records=records,
        span_entries=[],
        rule_a=("alpha", "LA"),
        rule_b=("beta", "LB"),
        expected=expected,
    )


def method_diff_corpus(
    seed: int, n_coincident: int = 30, n_onesided: int = 12
) -> DiffCorpus:
    """One confirmed pair at method granularity.

    Each slot is one method. Coincident slots get a whole-method warning on
    one side (its own method span attached) and a single line inside on the
    other, resolved through the span index; they must agree. One-sided slots
    warn on exactly one side.
    """
    rng = random.Random(seed)
    catalog_a, catalog_b = _diff_catalogs()
    project = "proj"
    n_files = (n_coincident + n_onesided) // 6 + 1
    methods_per_file = 8
    span_entries = []
    all_methods: list[tuple[str, MethodSpan]] = []
    for j in range(n_files):
        file = f"m{j}.java"
        methods = [
            MethodSpan(name=f"m{j}meth{k}", start=20 * k + 1, end=20 * k + 15)
            for k in range(methods_per_file)
        ]
        span_entries.append(
            {
                "project": project,
                "file": file,
                "methods": [m.to_obj() for m in methods],
            }
        )
        all_methods.extend((file, m) for m in methods)
    rng.shuffle(all_methods)
    if n_coincident + n_onesided > len(all_methods):
        raise ValueError("not enough method slots for the requested corpus")

    records: list[WarningRecord] = []
    expected: list[tuple] = []
    cursor = 0
    for _ in range(n_coincident):
        file, span = all_methods[cursor]
        cursor += 1
        whole_side = rng.choice(("alpha", "beta"))
        if whole_side == "alpha":
            records.append(
                WarningRecord(
                    "alpha", "LA", project, file, span.start, span.end,
                    method_span=span,
                )
            )
            inner = span.start + rng.randint(0, span.end - span.start)
            records.append(WarningRecord("beta", "LB", project, file, inner, inner))
        else:
            records.append(
                WarningRecord(
                    "beta", "LB", project, file, span.start, span.end,
                    method_span=span,
                )
            )
            inner = span.start + rng.randint(0, span.end - span.start)
            records.append(WarningRecord("alpha", "LA", project, file, inner, inner))
    for _ in range(n_onesided):
        file, span = all_methods[cursor]
        cursor += 1
        warned_by = rng.choice(("side_a_only", "side_b_only"))
        tool, rule_id = ("alpha", "LA") if warned_by == "side_a_only" else ("beta", "LB")
        inner = span.start + rng.randint(0, span.end - span.start)
        records.append(WarningRecord(tool, rule_id, project, file, inner, inner))
        expected.append((project, file, (span.start, span.end), warned_by))

    return DiffCorpus(
        catalog_a=catalog_a,
        catalog_b=catalog_b,
        records=records,
        span_entries=span_entries,
        rule_a=("alpha", "LA"),
        rule_b=("beta", "LB"),
        expected=expected,
    )


def write_corpus_files(corpus: SyntheticCorpus, directory: str | Path) -> dict[str, Path]:
    """Materialize a corpus for CLI runs; returns the paths written."""
    from .catalog import save_catalog  # local import to avoid cycles

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "catalog_a": directory / "catalog_a.json",
        "catalog_b": directory / "catalog_b.json",
        "warnings": directory / "warnings.jsonl",
        "embeddings": directory / "embeddings.txt",
    }
    save_catalog(corpus.catalog_a, paths["catalog_a"])
    save_catalog(corpus.catalog_b, paths["catalog_b"])
    dump_jsonl([r.to_obj() for r in corpus.records], paths["warnings"])
    corpus.model.save_word2vec(paths["embeddings"])
    return paths
