"""Acceptance gate: one test per shipping criterion.

Run with -v to get one pass/fail line per criterion. Each test states its
tolerance and time budget inline; the oracles live in tests/oracles.py and
share no code with the package.
"""
from __future__ import annotations

import random
import time

import numpy as np
import pytest

from rulediff.diffing import MethodSpanIndex, diff_pair_line, diff_pair_method
from rulediff.jsonio import dumps_canonical
from rulediff.mapper import MappingConfig, PairCandidate, run_pipeline, score_all_pairs
from rulediff.similarity import (
    build_tf_idf,
    cosine,
    description_similarity,
    embed_rule,
)
from rulediff.synth import (
    line_diff_corpus,
    method_diff_corpus,
    planted_pair_corpus,
    random_mapping_corpus,
    toy_embedding_model,
)
from rulediff.triage import cohen_kappa, kappa_from_confusion
from rulediff.warnstore import MethodSpan, WarningStore, compute_stats

from . import oracles
from .conftest import build_index, make_record, make_rule
from .e2e_utils import GOLDEN, compare_against_golden, replay_pipeline

WORDS = [f"tok{i:02d}" for i in range(50)]


def freeze(corpus):
    store = WarningStore()
    result = store.ingest_records(corpus.records, corpus.catalog_a, corpus.catalog_b)
    assert not result.rejected
    return store.freeze()


def survivors_fingerprint(survivors):
    return dumps_canonical([c.to_obj() for c in survivors])


def test_c1_similarity_scores_match_oracle_on_200_pairs():
    """200 random rule pairs: every component within 1e-9 of the naive
    recomputation, rule vectors within 1e-12, symmetry exact. Budget 5s."""
    started = time.monotonic()
    rng = random.Random(1)
    model = toy_embedding_model(WORDS, dim=24, seed=9)
    word_lists = {w: v.tolist() for w, v in model.vectors.items()}

    rules_a = [
        make_rule(
            "alpha", f"A{i}",
            " ".join(rng.choices(WORDS, k=3)),
            " ".join(rng.choices(WORDS, k=rng.randint(3, 12))),
            examples=(
                [f"class Sample{i}Check {{ int {rng.choice(WORDS)}; }}"]
                if rng.random() < 0.6 else []
            ),
        )
        for i in range(20)
    ]
    rules_b = [
        make_rule(
            "beta", f"B{i}",
            " ".join(rng.choices(WORDS, k=3)),
            " ".join(rng.choices(WORDS, k=rng.randint(3, 12))),
            examples=(
                [f"class Sample{i}Probe {{ int {rng.choice(WORDS)}; }}"]
                if rng.random() < 0.6 else []
            ),
        )
        for i in range(10)
    ]
    corpus = {r.key: r.text for r in rules_a + rules_b}
    tfidf = build_tf_idf(corpus)
    ref_tfidf = oracles.naive_tf_idf(corpus)

    checked = 0
    for ra in rules_a:
        for rb in rules_b:
            ours = description_similarity(ra, rb, model, tfidf)
            term_ref = oracles.naive_sparse_cosine(ref_tfidf[ra.key], ref_tfidf[rb.key])
            vec_a = embed_rule(ra.text, model)
            ref_a = oracles.naive_mean_embedding(ra.text, word_lists, model.dim)
            np.testing.assert_allclose(vec_a, ref_a, atol=1e-12)
            semt_ref = oracles.naive_dense_cosine(
                ref_a, oracles.naive_mean_embedding(rb.text, word_lists, model.dim)
            )
            semt_ref = min(1.0, max(0.0, semt_ref))  # scores are clamped
            terms_a, terms_b = ra.code_terms, rb.code_terms
            union = terms_a | terms_b
            code_ref = len(terms_a & terms_b) / len(union) if union else 0.0
            assert ours.term_sim == pytest.approx(term_ref, abs=1e-9)
            assert ours.semt_sim == pytest.approx(semt_ref, abs=1e-9)
            assert ours.code_sim == pytest.approx(code_ref, abs=1e-9)
            assert ours.description_sim == pytest.approx(
                oracles.naive_combined(term_ref, semt_ref, code_ref), abs=1e-9
            )
            mirrored = description_similarity(rb, ra, model, tfidf)
            assert mirrored == ours  # exact symmetry, no tolerance
            checked += 1
    assert checked == 200
    assert time.monotonic() - started < 5.0


def test_c2_tf_idf_matches_brute_force_on_ten_corpora():
    """10 random corpora of up to 10 rules: weights within 1e-9. Budget 5s."""
    started = time.monotonic()
    rng = random.Random(2)
    for trial in range(10):
        n = rng.randint(2, 10)
        corpus = {
            f"doc{i}": " ".join(rng.choices(WORDS, k=rng.randint(1, 30)))
            for i in range(n)
        }
        idf_log = trial % 2 == 1
        ours = build_tf_idf(corpus, idf_log=idf_log)
        ref = oracles.naive_tf_idf(corpus, idf_log=idf_log)
        assert ours.keys() == ref.keys()
        for key in ours:
            assert ours[key].keys() == ref[key].keys()
            for term, weight in ours[key].items():
                assert weight == pytest.approx(ref[key][term], abs=1e-9)
    assert time.monotonic() - started < 5.0


def test_c3_rule_vectors_match_brute_force_mean():
    """100 texts against a 50-word embedding file: vectors within 1e-12;
    all-unknown text gives the zero vector and semantic similarity 0."""
    model = toy_embedding_model(WORDS, dim=32, seed=4)
    word_lists = {w: v.tolist() for w, v in model.vectors.items()}
    rng = random.Random(3)
    for _ in range(100):
        k = rng.randint(1, 20)
        tokens = rng.choices(WORDS + ["unknownword", "neverSeen"], k=k)
        text = " ".join(tokens)
        ours = embed_rule(text, model)
        ref = oracles.naive_mean_embedding(text, word_lists, model.dim)
        np.testing.assert_allclose(ours, ref, atol=1e-12)
    oov = embed_rule("completely absent vocabulary", model)
    assert not oov.any()
    assert cosine(oov, embed_rule(WORDS[0], model)) == 0.0


def test_c4_funnel_properties_on_50_random_corpora():
    """Monotone stage counts, one-to-one locking, and byte-identical output
    across repeated runs and across 1 vs 4 scoring threads."""
    for seed in range(50):
        corpus = random_mapping_corpus(seed)
        index = freeze(corpus)
        survivors, report = run_pipeline(
            corpus.catalog_a, corpus.catalog_b, index, model=corpus.model
        )
        assert (
            report.total_candidates
            >= report.after_a
            >= report.after_b
            >= report.after_c
            >= report.after_d
        ), report.to_obj()
        assert len(survivors) == report.after_d
        locked = [c for c in survivors if c.stage == "locked_b"]
        assert len({c.rule_a for c in locked}) == len(locked)
        assert len({c.rule_b for c in locked}) == len(locked)

        rerun, _ = run_pipeline(
            corpus.catalog_a, corpus.catalog_b, index, model=corpus.model
        )
        threaded, _ = run_pipeline(
            corpus.catalog_a, corpus.catalog_b, index, model=corpus.model, workers=4
        )
        fingerprint = survivors_fingerprint(survivors)
        assert survivors_fingerprint(rerun) == fingerprint
        assert survivors_fingerprint(threaded) == fingerprint


def test_c5_planted_pairs_are_recovered():
    """Synthetic corpus with 20 planted equivalent pairs: at least 18
    survive and at least 90% of the other stage-a candidates are pruned.
    Budget 30s."""
    started = time.monotonic()
    corpus = planted_pair_corpus(seed=0, n_planted=20, n_distractors=30)
    index = freeze(corpus)
    config = MappingConfig()
    scores = score_all_pairs(
        corpus.catalog_a, corpus.catalog_b, corpus.model, config
    )
    from rulediff.mapper import stage_a_mutual_top_n

    stage_a = stage_a_mutual_top_n(
        corpus.catalog_a, corpus.catalog_b, scores, config
    )
    survivors, report = run_pipeline(
        corpus.catalog_a, corpus.catalog_b, index, config, corpus.model
    )
    planted = set(corpus.planted)
    got = {(c.rule_a, c.rule_b) for c in survivors}
    assert len(got & planted) >= 18, f"only {len(got & planted)} planted pairs kept"
    non_planted_a = [c for c in stage_a if (c.rule_a, c.rule_b) not in planted]
    surviving_non_planted = [
        c for c in survivors if (c.rule_a, c.rule_b) not in planted
    ]
    assert non_planted_a, "stage a must produce distractor candidates to prune"
    pruned_fraction = 1 - len(surviving_non_planted) / len(non_planted_a)
    assert pruned_fraction >= 0.9, f"only {pruned_fraction:.0%} of distractors pruned"
    assert time.monotonic() - started < 30.0


def test_c6_diff_matches_brute_force_comparator():
    """20 corpora of up to 1000 warnings with 12 seeded one-sided spots,
    both granularities: inconsistencies equal the set-difference oracle, and
    a whole-method warning against its return line yields none. Budget 10s."""
    started = time.monotonic()
    for seed in range(10):
        corpus = line_diff_corpus(seed, n_coincident=40, n_onesided=12)
        assert len(corpus.records) <= 1000
        index = freeze(corpus)
        pair = PairCandidate(rule_a=corpus.rule_a, rule_b=corpus.rule_b)
        got = diff_pair_line(pair, index)
        view = sorted(
            (r.project_id, r.file_path, r.line, r.warned_by) for r in got
        )
        records_a = [r for r in corpus.records if r.key == corpus.rule_a]
        records_b = [r for r in corpus.records if r.key == corpus.rule_b]
        assert view == oracles.naive_line_diff(records_a, records_b)
        assert len(got) == 12

    for seed in range(10):
        corpus = method_diff_corpus(seed, n_coincident=30, n_onesided=12)
        assert len(corpus.records) <= 1000
        index = freeze(corpus)
        spans = MethodSpanIndex.from_entries(corpus.span_entries)
        pair = PairCandidate(rule_a=corpus.rule_a, rule_b=corpus.rule_b)
        got = diff_pair_method(pair, index, spans)
        view = sorted(
            (r.project_id, r.file_path, (r.method.start, r.method.end), r.warned_by)
            for r in got
        )
        span_lookup = [
            (e["project"], e["file"], m["start"], m["end"])
            for e in corpus.span_entries
            for m in e["methods"]
        ]
        records_a = [r for r in corpus.records if r.key == corpus.rule_a]
        records_b = [r for r in corpus.records if r.key == corpus.rule_b]
        assert view == oracles.naive_method_diff(records_a, records_b, span_lookup)
        assert len(got) == 12

    # the canonical granularity trap: whole method vs its return line
    a = make_rule("alpha", "A1", "whole method reporter")
    b = make_rule("beta", "B1", "return line reporter")
    from rulediff.catalog import RuleCatalog

    catalog_a = RuleCatalog(tool_id="alpha", rules=[a])
    catalog_b = RuleCatalog(tool_id="beta", rules=[b])
    span = MethodSpan(name="transfer", start=100, end=140)
    records = [
        make_record("alpha", "A1", start=100, end=140, span=span),
        make_record("beta", "B1", start=139),
    ]
    index = build_index(records, catalog_a, catalog_b)
    spans = MethodSpanIndex.from_entries(
        [{"project": "p", "file": "F.java", "methods": [span.to_obj()]}]
    )
    pair = PairCandidate(rule_a=("alpha", "A1"), rule_b=("beta", "B1"))
    assert diff_pair_method(pair, index, spans) == []
    assert time.monotonic() - started < 10.0


def test_c7_kappa_reference_points():
    """[[20,5],[5,20]] gives 0.6; identical raters give 1.0; marginal-level
    agreement gives 0.0. All within 1e-9."""
    assert kappa_from_confusion([[20, 5], [5, 20]]) == pytest.approx(0.6, abs=1e-9)
    same = {f"s{i}": ("accept" if i % 3 else "reject") for i in range(12)}
    assert cohen_kappa(same, dict(same)) == pytest.approx(1.0, abs=1e-9)
    r1 = {"s1": "x", "s2": "x", "s3": "y", "s4": "y"}
    r2 = {"s1": "x", "s2": "y", "s3": "x", "s4": "y"}
    assert cohen_kappa(r1, r2) == pytest.approx(0.0, abs=1e-9)


def test_c8_trigger_stats_quartiles_and_coverage():
    """Counts [1,2,3,4] quartile to (1.75, 2.5, 3.25) under linear
    interpolation; coverage counts triggered rules over the catalog size."""
    from rulediff.catalog import RuleCatalog

    rules = [make_rule("alpha", f"A{i}", f"rule number {i}") for i in range(6)]
    catalog = RuleCatalog(tool_id="alpha", rules=rules)
    records = []
    for rule, count in zip(rules, (1, 2, 3, 4)):  # two rules stay silent
        records.extend(
            make_record("alpha", rule.rule_id, file=f"{rule.rule_id}_{i}.java")
            for i in range(count)
        )
    index = build_index(records, catalog)
    stats = compute_stats(index, catalog)
    assert stats.quartiles[1] == pytest.approx(1.75, abs=1e-9)
    assert stats.quartiles[2] == pytest.approx(2.5, abs=1e-9)
    assert stats.quartiles[3] == pytest.approx(3.25, abs=1e-9)
    assert stats.quartiles[0] == 1.0 and stats.quartiles[4] == 4.0
    assert stats.triggered_rules == 4
    assert stats.pct_triggered == pytest.approx(4 / 6, abs=1e-9)


def test_c9_end_to_end_replay_is_byte_exact(tmp_path):
    """The full CLI pipeline over the committed fixture reproduces every
    committed artifact byte for byte. Budget 10s."""
    started = time.monotonic()
    replay_pipeline(GOLDEN / "inputs", tmp_path)
    mismatched = compare_against_golden(tmp_path)
    assert mismatched == [], f"artifacts differ from fixture: {mismatched}"
    assert time.monotonic() - started < 10.0
