from __future__ import annotations

import json

import pytest

from rulediff.cli import main
from rulediff.jsonio import load_jsonl
from rulediff.synth import planted_pair_corpus, write_corpus_files


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("corpus")
    corpus = planted_pair_corpus(seed=5)
    paths = write_corpus_files(corpus, directory)
    return corpus, paths


def run_map(paths, out_dir, *extra):
    argv = [
        "map",
        "--catalog-a", str(paths["catalog_a"]),
        "--catalog-b", str(paths["catalog_b"]),
        "--warnings", str(paths["warnings"]),
        "--embeddings", str(paths["embeddings"]),
        "--out-survivors", str(out_dir / "survivors.json"),
        "--out-report", str(out_dir / "mapping_report.json"),
        *extra,
    ]
    return main(argv)


def test_map_writes_survivors_and_report(corpus_dir, tmp_path):
    corpus, paths = corpus_dir
    assert run_map(paths, tmp_path) == 0
    survivors = json.loads((tmp_path / "survivors.json").read_text())
    report = json.loads((tmp_path / "mapping_report.json").read_text())
    assert len(survivors["pairs"]) == len(corpus.planted)
    assert report["after_d"] == len(corpus.planted)
    first = survivors["pairs"][0]
    assert first["id"].startswith("pair-")
    assert first["scores"]["description_sim"] > 0
    assert len(first["sample_shared_warnings"]) == 5
    assert set(first["sample_shared_warnings"][0]) == {"project", "file", "line"}
    assert (tmp_path / "manifest.json").exists()


def test_map_outputs_are_deterministic(corpus_dir, tmp_path):
    _, paths = corpus_dir
    first = tmp_path / "one"
    second = tmp_path / "two"
    first.mkdir(), second.mkdir()
    assert run_map(paths, first) == 0
    assert run_map(paths, second, "--workers", "4") == 0
    for name in ("survivors.json", "mapping_report.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_diff_auto_accept_and_stats_and_report(corpus_dir, tmp_path):
    corpus, paths = corpus_dir
    assert run_map(paths, tmp_path) == 0
    rc = main([
        "diff",
        "--catalog-a", str(paths["catalog_a"]),
        "--catalog-b", str(paths["catalog_b"]),
        "--survivors", str(tmp_path / "survivors.json"),
        "--warnings", str(paths["warnings"]),
        "--auto-accept",
        "--out", str(tmp_path / "inconsistencies.jsonl"),
        "--out-counts", str(tmp_path / "counts.json"),
    ])
    assert rc == 0
    incs = load_jsonl(tmp_path / "inconsistencies.jsonl")
    assert incs and all(rec["id"].startswith("inc-") for rec in incs)
    counts = json.loads((tmp_path / "counts.json").read_text())
    assert counts["pairs"] == len(corpus.planted)
    assert counts["inconsistencies"] == len(incs)

    rc = main([
        "stats",
        "--catalog", str(paths["catalog_a"]),
        "--warnings", str(paths["warnings"]),
        "--out", str(tmp_path / "stats.json"),
    ])
    assert rc == 0
    stats = json.loads((tmp_path / "stats.json").read_text())
    assert stats["tool"] == "alpha"
    assert 0 < stats["pct_triggered"] <= 1

    (tmp_path / "verdicts.jsonl").write_text("", encoding="utf-8")
    rc = main([
        "report",
        "--survivors", str(tmp_path / "survivors.json"),
        "--inconsistencies", str(tmp_path / "inconsistencies.jsonl"),
        "--verdicts", str(tmp_path / "verdicts.jsonl"),
        "--out", str(tmp_path / "report.json"),
        "--text", str(tmp_path / "report.txt"),
    ])
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["funnel"]["pairs"]["total"] == len(corpus.planted)
    assert (tmp_path / "report.txt").read_text()


def test_diff_needs_review_decision(corpus_dir, tmp_path, capsys):
    _, paths = corpus_dir
    assert run_map(paths, tmp_path) == 0
    rc = main([
        "diff",
        "--catalog-a", str(paths["catalog_a"]),
        "--catalog-b", str(paths["catalog_b"]),
        "--survivors", str(tmp_path / "survivors.json"),
        "--warnings", str(paths["warnings"]),
        "--out", str(tmp_path / "out.jsonl"),
    ])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["code"] == "usage"
    assert "--auto-accept" in err["error"]["message"]


def test_diff_respects_verdicts(corpus_dir, tmp_path):
    _, paths = corpus_dir
    assert run_map(paths, tmp_path) == 0
    survivors = json.loads((tmp_path / "survivors.json").read_text())
    confirmed_id = survivors["pairs"][0]["id"]
    rejected_id = survivors["pairs"][1]["id"]
    verdicts = [
        {"subject": confirmed_id, "reviewer": "r1", "verdict": "accept",
         "pattern": None, "note": "", "ts": "2026-01-01T00:00:00+00:00"},
        {"subject": rejected_id, "reviewer": "r1", "verdict": "reject",
         "pattern": None, "note": "", "ts": "2026-01-01T00:00:00+00:00"},
    ]
    log = tmp_path / "verdicts.jsonl"
    log.write_text(
        "".join(json.dumps(v, sort_keys=True) + "\n" for v in verdicts),
        encoding="utf-8",
    )
    rc = main([
        "diff",
        "--catalog-a", str(paths["catalog_a"]),
        "--catalog-b", str(paths["catalog_b"]),
        "--survivors", str(tmp_path / "survivors.json"),
        "--warnings", str(paths["warnings"]),
        "--verdicts", str(log),
        "--out", str(tmp_path / "inconsistencies.jsonl"),
        "--out-counts", str(tmp_path / "counts.json"),
    ])
    assert rc == 0
    counts = json.loads((tmp_path / "counts.json").read_text())
    assert counts["pairs"] == 1  # only the accepted pair was diffed
    assert set(counts["per_pair"]) == {confirmed_id}


def test_config_file_and_flag_precedence(corpus_dir, tmp_path):
    _, paths = corpus_dir
    config = tmp_path / "config.json"
    config.write_text('{"top_n": 1, "file_overlap_min": 0.5}', encoding="utf-8")
    out = tmp_path / "a"
    out.mkdir()
    assert run_map(paths, out, "--config", str(config)) == 0
    written = json.loads((out / "survivors.json").read_text())["config"]
    assert written["top_n"] == 1
    assert written["file_overlap_min"] == 0.5
    out2 = tmp_path / "b"
    out2.mkdir()
    assert run_map(paths, out2, "--config", str(config), "--top-n", "4") == 0
    written = json.loads((out2 / "survivors.json").read_text())["config"]
    assert written["top_n"] == 4  # flag beats file
    assert written["file_overlap_min"] == 0.5  # file beats default


def test_unknown_config_key_is_rejected(corpus_dir, tmp_path, capsys):
    _, paths = corpus_dir
    config = tmp_path / "config.json"
    config.write_text('{"top_m": 2}', encoding="utf-8")
    rc = run_map(paths, tmp_path, "--config", str(config))
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["code"] == "config"


def test_missing_input_exits_2_with_json_error(tmp_path, capsys):
    rc = main([
        "stats",
        "--catalog", str(tmp_path / "absent.json"),
        "--warnings", str(tmp_path / "absent.jsonl"),
        "--out", str(tmp_path / "out.json"),
    ])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["code"] == "usage"
    assert "absent.json" in err["error"]["fields"][0]


def test_strict_manifest_blocks_changed_input(corpus_dir, tmp_path, capsys):
    corpus, _ = corpus_dir
    paths = write_corpus_files(corpus, tmp_path / "inputs")
    out = tmp_path / "run"
    out.mkdir()
    assert run_map(paths, out, "--strict") == 0
    # tamper with the warnings file between stages
    with open(paths["warnings"], "a", encoding="utf-8") as fh:
        fh.write("\n")
    rc = main([
        "stats",
        "--catalog", str(paths["catalog_a"]),
        "--warnings", str(paths["warnings"]),
        "--out", str(out / "stats.json"),
        "--manifest", str(out / "manifest.json"),
        "--strict",
    ])
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["code"] == "reproducibility"


def test_ingest_warnings_writes_rejects(corpus_dir, tmp_path):
    _, paths = corpus_dir
    bad = tmp_path / "extra.jsonl"
    bad.write_text(
        json.dumps({
            "tool": "alpha", "rule_id": "GHOST", "project": "p",
            "file": "F.java", "start_line": 1, "end_line": 1,
        }) + "\n",
        encoding="utf-8",
    )
    rc = main([
        "ingest-warnings",
        "--catalog", str(paths["catalog_a"]),
        "--catalog", str(paths["catalog_b"]),
        "--warnings", str(paths["warnings"]),
        "--warnings", str(bad),
        "--out", str(tmp_path / "accepted.jsonl"),
        "--rejects", str(tmp_path / "rejects.jsonl"),
    ])
    assert rc == 0
    rejects = load_jsonl(tmp_path / "rejects.jsonl")
    assert len(rejects) == 1 and "GHOST" in rejects[0]["reason"]


def test_convert_sarif_cli(tmp_path):
    sarif = {
        "version": "2.1.0",
        "runs": [{
            "tool": {"driver": {"name": "beta"}},
            "results": [{
                "ruleId": "B1",
                "locations": [{
                    "physicalLocation": {
                        "artifactLocation": {"uri": "F.java"},
                        "region": {"startLine": 4, "endLine": 6},
                    }
                }],
            }],
        }],
    }
    src = tmp_path / "scan.sarif"
    src.write_text(json.dumps(sarif), encoding="utf-8")
    rc = main([
        "convert-sarif",
        "--sarif", str(src),
        "--project", "proj",
        "--out", str(tmp_path / "warnings.jsonl"),
    ])
    assert rc == 0
    records = load_jsonl(tmp_path / "warnings.jsonl")
    assert records[0]["rule_id"] == "B1"
    assert records[0]["project"] == "proj"


def test_kappa_cli(tmp_path, capsys):
    verdicts = []
    for i in range(10):
        agree = i < 8
        verdicts.append({"subject": f"pair-{i:012x}", "reviewer": "r1",
                         "verdict": "accept", "pattern": None, "note": "",
                         "ts": "2026-01-01T00:00:00+00:00"})
        verdicts.append({"subject": f"pair-{i:012x}", "reviewer": "r2",
                         "verdict": "accept" if agree else "reject",
                         "pattern": None, "note": "",
                         "ts": "2026-01-01T00:00:00+00:00"})
    log = tmp_path / "verdicts.jsonl"
    log.write_text(
        "".join(json.dumps(v, sort_keys=True) + "\n" for v in verdicts),
        encoding="utf-8",
    )
    rc = main([
        "kappa",
        "--verdicts", str(log),
        "--reviewer-a", "r1",
        "--reviewer-b", "r2",
        "--kind", "pairs",
    ])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["n_subjects"] == 10
    assert -1.0 <= out["kappa"] <= 1.0


def test_ingest_rules_normalizes(corpus_dir, tmp_path):
    _, paths = corpus_dir
    rc = main([
        "ingest-rules",
        "--catalog", str(paths["catalog_a"]),
        "--out", str(tmp_path / "normalized.json"),
    ])
    assert rc == 0
    data = json.loads((tmp_path / "normalized.json").read_text())
    assert data["tool"] == "alpha" and data["rules"]


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
