"""Command-line pipeline.

Subcommands cover the whole workflow: ingest-rules, ingest-warnings,
convert-sarif, map, diff, stats, report, serve, and kappa. Every stage
writes canonical JSON and records content digests in a run manifest;
--strict makes a stage refuse inputs that changed since the manifest
recorded them. Failures print {"error": {...}} to stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .catalog import RuleCatalog, load_catalog, save_catalog
from .diffing import GranularityMap, InconsistencyRecord, MethodSpanIndex, diff_all
from .errors import RuleDiffError, UsageError
from .jsonio import dump_json, dump_jsonl, load_jsonl
from .manifest import RunManifest
from .mapper import MappingConfig, PairCandidate, run_pipeline
from .sarif import convert_sarif_file
from .similarity import EmbeddingModel
from .triage import cohen_kappa, render_report_text, summarize_findings
from .server import attach_rule_details, build_store, create_app
from .warnstore import WarningIndex, WarningStore, compute_stats


def _require_files(*paths) -> None:
    missing = [str(p) for p in paths if p and not Path(p).exists()]
    if missing:
        raise UsageError(f"missing input files: {', '.join(missing)}", fields=missing)


def _manifest_for(args, primary_out) -> RunManifest:
    path = args.manifest or (Path(primary_out).parent / "manifest.json")
    return RunManifest.load_or_create(path)


def _rejects_obj(rejects) -> list[dict]:
    return [
        {"reason": r.reason, "line": r.line_no, "record": r.record} for r in rejects
    ]


def _load_index(
    manifest: RunManifest,
    strict: bool,
    warning_paths,
    catalogs: list[RuleCatalog],
    digests: dict[str, str],
) -> tuple[WarningIndex, list]:
    store = WarningStore()
    rejects = []
    for path in warning_paths:
        digests[str(path)] = manifest.check_input(path, strict)
        result = store.ingest(path, *catalogs)
        rejects.extend(result.rejected)
    return store.freeze(), rejects


def _mapping_config(args) -> MappingConfig:
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    merged: dict = {}
    if args.config:
        _require_files(args.config)
        try:
            merged.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: invalid JSON: {exc.msg}") from None
    for name in (
        "top_n",
        "lock_threshold",
        "trigger_ratio_max",
        "file_overlap_min",
        "idf_log",
        "trigger_mode",
    ):
        value = getattr(args, name)
        if value is not None:
            merged[name] = value
    return MappingConfig.from_obj(merged)


def _sample_shared(cand: PairCandidate, index: WarningIndex, limit: int = 5) -> list[dict]:
    if not (index.triggered(cand.rule_a) and index.triggered(cand.rule_b)):
        return []
    shared = sorted(index.lines(cand.rule_a) & index.lines(cand.rule_b))[:limit]
    return [{"project": p, "file": f, "line": line} for p, f, line in shared]


def _load_survivors(path) -> list[dict]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict) or "pairs" not in data:
        raise UsageError(f"{path} is not a survivors file")
    return data["pairs"]


def cmd_ingest_rules(args) -> int:
    _require_files(args.catalog)
    manifest = _manifest_for(args, args.out)
    digest = manifest.check_input(args.catalog, args.strict)
    catalog = load_catalog(args.catalog)
    save_catalog(catalog, args.out)
    manifest.record("ingest-rules", {str(args.catalog): digest}, [args.out])
    print(f"{catalog.tool_id}: {len(catalog)} rules -> {args.out}")
    return 0


def cmd_ingest_warnings(args) -> int:
    _require_files(*args.catalog, *args.warnings)
    manifest = _manifest_for(args, args.out)
    digests = {}
    catalogs = []
    for path in args.catalog:
        digests[str(path)] = manifest.check_input(path, args.strict)
        catalogs.append(load_catalog(path))
    store = WarningStore(dedup=not args.keep_duplicates)
    rejects = []
    for path in args.warnings:
        digests[str(path)] = manifest.check_input(path, args.strict)
        result = store.ingest(path, *catalogs)
        rejects.extend(result.rejected)
    index = store.freeze()
    records = [
        record.to_obj()
        for key in sorted(index.by_rule)
        for record in index.by_rule[key]
    ]
    dump_jsonl(records, args.out)
    outputs = [args.out]
    if args.rejects:
        dump_jsonl(_rejects_obj(rejects), args.rejects)
        outputs.append(args.rejects)
    manifest.record("ingest-warnings", digests, outputs)
    print(f"accepted {len(records)} warnings, rejected {len(rejects)} -> {args.out}")
    return 0


def cmd_convert_sarif(args) -> int:
    _require_files(args.sarif)
    manifest = _manifest_for(args, args.out)
    digest = manifest.check_input(args.sarif, args.strict)
    conversion = convert_sarif_file(args.sarif, project=args.project, tool=args.tool)
    dump_jsonl(conversion.records, args.out)
    manifest.record("convert-sarif", {str(args.sarif): digest}, [args.out])
    print(
        f"converted {len(conversion.records)} results "
        f"({conversion.skipped} skipped) -> {args.out}"
    )
    return 0


def cmd_map(args) -> int:
    _require_files(args.catalog_a, args.catalog_b, *args.warnings, args.embeddings)
    manifest = _manifest_for(args, args.out_survivors)
    config = _mapping_config(args)
    digests = {
        str(args.catalog_a): manifest.check_input(args.catalog_a, args.strict),
        str(args.catalog_b): manifest.check_input(args.catalog_b, args.strict),
    }
    catalog_a = load_catalog(args.catalog_a)
    catalog_b = load_catalog(args.catalog_b)
    model = None
    if args.embeddings:
        digests[str(args.embeddings)] = manifest.check_input(args.embeddings, args.strict)
        model = EmbeddingModel.load_word2vec(args.embeddings)
    index, rejects = _load_index(
        manifest, args.strict, args.warnings, [catalog_a, catalog_b], digests
    )
    survivors, report = run_pipeline(
        catalog_a, catalog_b, index, config, model, workers=args.workers
    )
    dump_json(
        {
            "config": config.to_obj(),
            "pairs": [
                {**cand.to_obj(), "sample_shared_warnings": _sample_shared(cand, index)}
                for cand in survivors
            ],
        },
        args.out_survivors,
    )
    dump_json(report.to_obj(), args.out_report)
    outputs = [args.out_survivors, args.out_report]
    if args.rejects:
        dump_jsonl(_rejects_obj(rejects), args.rejects)
        outputs.append(args.rejects)
    manifest.record("map", digests, outputs)
    print(
        f"{report.total_candidates} candidates -> {report.after_a} after similarity, "
        f"{len(survivors)} survivors ({report.locked} locked)"
    )
    return 0


def cmd_diff(args) -> int:
    if not args.auto_accept and not args.verdicts:
        raise UsageError("diff needs --verdicts (reviewed pairs) or --auto-accept")
    _require_files(
        args.catalog_a, args.catalog_b, args.survivors, *args.warnings,
        args.spans, args.granularity, args.verdicts,
    )
    manifest = _manifest_for(args, args.out)
    digests = {
        str(args.survivors): manifest.check_input(args.survivors, args.strict),
        str(args.catalog_a): manifest.check_input(args.catalog_a, args.strict),
        str(args.catalog_b): manifest.check_input(args.catalog_b, args.strict),
    }
    catalog_a = load_catalog(args.catalog_a)
    catalog_b = load_catalog(args.catalog_b)
    survivor_objs = _load_survivors(args.survivors)
    pairs = [PairCandidate.from_obj(obj) for obj in survivor_objs]
    if args.auto_accept:
        selected = pairs
    else:
        digests[str(args.verdicts)] = manifest.check_input(args.verdicts, args.strict)
        store = build_store(survivor_objs, [], log_path=None, replay=False)
        # the log may also hold inconsistency labels from a later round
        store.replay(args.verdicts, ignore_unknown=True)
        confirmed = set(store.confirmed_pairs())
        selected = [p for p in pairs if p.id in confirmed]
    index, _rejects = _load_index(
        manifest, args.strict, args.warnings, [catalog_a, catalog_b], digests
    )
    spans = None
    if args.spans:
        digests[str(args.spans)] = manifest.check_input(args.spans, args.strict)
        spans = MethodSpanIndex.from_jsonl(args.spans)
    granularity = None
    if args.granularity:
        digests[str(args.granularity)] = manifest.check_input(args.granularity, args.strict)
        granularity = GranularityMap.from_file(args.granularity)
    records, counts = diff_all(selected, index, spans, granularity)
    dump_jsonl([r.to_obj() for r in records], args.out)
    outputs = [args.out]
    if args.out_counts:
        dump_json(
            {"pairs": len(selected), "inconsistencies": len(records), "per_pair": counts},
            args.out_counts,
        )
        outputs.append(args.out_counts)
    manifest.record("diff", digests, outputs)
    print(f"{len(selected)} pairs -> {len(records)} inconsistencies -> {args.out}")
    return 0


def cmd_stats(args) -> int:
    _require_files(args.catalog, *args.warnings)
    manifest = _manifest_for(args, args.out)
    digests = {str(args.catalog): manifest.check_input(args.catalog, args.strict)}
    catalog = load_catalog(args.catalog)
    index, _rejects = _load_index(
        manifest, args.strict, args.warnings, [catalog], digests
    )
    stats = compute_stats(index, catalog)
    dump_json(stats.to_obj(), args.out)
    manifest.record("stats", digests, [args.out])
    print(
        f"{catalog.tool_id}: {stats.triggered_rules}/{stats.total_rules} rules "
        f"triggered ({stats.pct_triggered:.1%})"
    )
    return 0


def _load_review_state(args, manifest, digests):
    survivor_objs = _load_survivors(args.survivors)
    inconsistencies = [
        InconsistencyRecord.from_obj(obj) for obj in load_jsonl(args.inconsistencies)
    ]
    return survivor_objs, inconsistencies


def cmd_report(args) -> int:
    _require_files(args.survivors, args.inconsistencies, args.verdicts)
    manifest = _manifest_for(args, args.out)
    digests = {
        str(args.survivors): manifest.check_input(args.survivors, args.strict),
        str(args.inconsistencies): manifest.check_input(args.inconsistencies, args.strict),
    }
    survivor_objs, inconsistencies = _load_review_state(args, manifest, digests)
    store = build_store(survivor_objs, inconsistencies, log_path=None, replay=False)
    if args.verdicts:
        digests[str(args.verdicts)] = manifest.check_input(args.verdicts, args.strict)
        store.replay(args.verdicts)
    report = summarize_findings(store, inconsistencies)
    report["confirmed_pairs"] = sorted(store.confirmed_pairs())
    dump_json(report, args.out)
    outputs = [args.out]
    if args.text:
        Path(args.text).write_text(render_report_text(report), encoding="utf-8")
        outputs.append(args.text)
    manifest.record("report", digests, outputs)
    funnel = report["funnel"]
    print(
        f"{funnel['pairs']['confirmed']} confirmed pairs, "
        f"{funnel['inconsistencies']['labeled']} labeled inconsistencies -> {args.out}"
    )
    return 0


def cmd_kappa(args) -> int:
    _require_files(args.verdicts)
    prefix = {"pairs": "pair-", "inconsistencies": "inc-"}.get(args.kind)
    latest: dict[tuple[str, str], str] = {}
    for obj in load_jsonl(args.verdicts):
        subject, reviewer = obj["subject"], obj["reviewer"]
        if prefix and not subject.startswith(prefix):
            continue
        latest[(subject, reviewer)] = obj["verdict"]
    r1 = {s: v for (s, r), v in latest.items() if r == args.reviewer_a}
    r2 = {s: v for (s, r), v in latest.items() if r == args.reviewer_b}
    shared = sorted(set(r1) & set(r2))
    kappa = cohen_kappa({s: r1[s] for s in shared}, {s: r2[s] for s in shared})
    result = {
        "reviewer_a": args.reviewer_a,
        "reviewer_b": args.reviewer_b,
        "kind": args.kind,
        "n_subjects": len(shared),
        "kappa": kappa,
    }
    print(json.dumps(result, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    _require_files(args.survivors, args.inconsistencies)
    survivor_objs = _load_survivors(args.survivors)
    if args.catalog_a or args.catalog_b:
        catalogs = [
            load_catalog(path)
            for path in (args.catalog_a, args.catalog_b)
            if path
        ]
        survivor_objs = attach_rule_details(survivor_objs, *catalogs)
    inconsistencies = [
        InconsistencyRecord.from_obj(obj) for obj in load_jsonl(args.inconsistencies)
    ]
    store = build_store(survivor_objs, inconsistencies, log_path=args.verdict_log)
    app = create_app(
        survivor_objs,
        inconsistencies,
        store,
        source_dir=args.source_dir,
        ui_dir=args.ui_dir,
    )
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rulediff",
        description="Differential testing of static-analysis rule catalogs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--manifest", default=None, help="run manifest path")
        p.add_argument(
            "--strict",
            action="store_true",
            help="fail when an input differs from its recorded digest",
        )

    p = sub.add_parser("ingest-rules", help="validate and normalize a rule catalog")
    p.add_argument("--catalog", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_ingest_rules)

    p = sub.add_parser("ingest-warnings", help="validate warning JSONL files")
    p.add_argument("--catalog", action="append", required=True)
    p.add_argument("--warnings", action="append", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rejects", default=None)
    p.add_argument("--keep-duplicates", action="store_true")
    common(p)
    p.set_defaults(func=cmd_ingest_warnings)

    p = sub.add_parser("convert-sarif", help="convert SARIF 2.1.0 to warning JSONL")
    p.add_argument("--sarif", required=True)
    p.add_argument("--project", required=True)
    p.add_argument("--tool", default=None)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_convert_sarif)

    p = sub.add_parser("map", help="run the pairing funnel")
    p.add_argument("--catalog-a", required=True)
    p.add_argument("--catalog-b", required=True)
    p.add_argument("--warnings", action="append", required=True)
    p.add_argument("--embeddings", default=None)
    p.add_argument("--config", default=None, help="JSON file of mapping options")
    p.add_argument("--top-n", type=int, default=None, dest="top_n")
    p.add_argument("--lock-threshold", type=float, default=None, dest="lock_threshold")
    p.add_argument(
        "--trigger-ratio-max", type=float, default=None, dest="trigger_ratio_max"
    )
    p.add_argument(
        "--file-overlap-min", type=float, default=None, dest="file_overlap_min"
    )
    p.add_argument(
        "--idf-log", action=argparse.BooleanOptionalAction, default=None, dest="idf_log"
    )
    p.add_argument(
        "--trigger-mode", choices=("ratio", "absolute"), default=None, dest="trigger_mode"
    )
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-survivors", required=True)
    p.add_argument("--out-report", required=True)
    p.add_argument("--rejects", default=None)
    common(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("diff", help="emit inconsistencies for confirmed pairs")
    p.add_argument("--catalog-a", required=True)
    p.add_argument("--catalog-b", required=True)
    p.add_argument("--survivors", required=True)
    p.add_argument("--warnings", action="append", required=True)
    p.add_argument("--spans", default=None, help="method-span sidecar JSONL")
    p.add_argument("--granularity", default=None, help="granularity config JSON")
    p.add_argument("--verdicts", default=None, help="verdict log JSONL")
    p.add_argument(
        "--auto-accept",
        action="store_true",
        help="treat every survivor as confirmed (no review round)",
    )
    p.add_argument("--out", required=True)
    p.add_argument("--out-counts", default=None)
    common(p)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("stats", help="trigger statistics for one catalog")
    p.add_argument("--catalog", required=True)
    p.add_argument("--warnings", action="append", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="findings tables and review funnel")
    p.add_argument("--survivors", required=True)
    p.add_argument("--inconsistencies", required=True)
    p.add_argument("--verdicts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--text", default=None, help="also render a plain-text report")
    common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("kappa", help="inter-rater agreement between two reviewers")
    p.add_argument("--verdicts", required=True)
    p.add_argument("--reviewer-a", required=True)
    p.add_argument("--reviewer-b", required=True)
    p.add_argument(
        "--kind", choices=("pairs", "inconsistencies", "all"), default="all"
    )
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("serve", help="run the local review API")
    p.add_argument("--survivors", required=True)
    p.add_argument("--inconsistencies", required=True)
    p.add_argument("--catalog-a", default=None, help="inline rule details")
    p.add_argument("--catalog-b", default=None)
    p.add_argument("--verdict-log", default="verdicts.jsonl")
    p.add_argument("--source-dir", default=None)
    p.add_argument("--ui-dir", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8417)
    p.set_defaults(func=cmd_serve)

    return parser


def _print_error(exc: RuleDiffError) -> None:
    payload = {"error": {"code": exc.code, "message": str(exc), "fields": exc.fields}}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _print_error(exc)
        return 2
    except RuleDiffError as exc:
        _print_error(exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
