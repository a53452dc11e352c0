#!/usr/bin/env python3
"""Record HTTP fixtures for the frontend test suite.

Starts the review API on the committed end-to-end fixture with a fresh
verdict log, performs the scripted review session the UI tests replay
(accept one pair, label three inconsistencies of one rule), and snapshots
every response into frontend/tests/fixtures/. Also dumps the aggregation
computed straight from the final log, so the UI tests can check the
dashboard against the backend's own numbers.

Usage: python3 scripts/record_ui_fixtures.py
"""
from __future__ import annotations

import json
import subprocess
import sys
import tempfile
import time
import urllib.request
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from rulediff.diffing import InconsistencyRecord
from rulediff.jsonio import dumps_canonical, load_jsonl
from rulediff.server import build_store
from rulediff.triage import summarize_findings

GOLDEN = ROOT / "tests" / "fixtures" / "golden"
OUT = ROOT / "frontend" / "tests" / "fixtures"
PORT = 8436
BASE = f"http://127.0.0.1:{PORT}"
REVIEWER = "carol"


def get(path: str):
    with urllib.request.urlopen(f"{BASE}{path}") as r:
        return json.load(r)


def post(path: str, body: dict):
    req = urllib.request.Request(
        f"{BASE}{path}",
        data=json.dumps(body).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(req) as r:
        return json.load(r)


def save(name: str, obj) -> None:
    path = OUT / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_canonical(obj))
    print(f"  {name}")


def wait_for_server() -> None:
    for _ in range(50):
        try:
            get("/health")
            return
        except OSError:
            time.sleep(0.2)
    raise RuntimeError("server did not come up")


def fake_source_tree(workdir: Path) -> Path:
    """Source files for every location the inconsistencies mention, so the
    recorded payloads carry real context windows."""
    root = workdir / "sources"
    needed: dict[tuple[str, str], int] = {}
    for obj in load_jsonl(GOLDEN / "expected" / "inconsistencies.jsonl"):
        location = obj["location"]
        line = location.get("line") or location["method"]["end"]
        key = (obj["project"], obj["file"])
        needed[key] = max(needed.get(key, 0), line)
    for (project, file), high in needed.items():
        path = root / project / file
        path.parent.mkdir(parents=True, exist_ok=True)
        body = [f"        statement(); // L{i}" for i in range(1, high + 10)]
        path.write_text("\n".join(body) + "\n")
    return root


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="uifix_"))
    log = workdir / "verdicts.jsonl"
    source_root = fake_source_tree(workdir)
    server = subprocess.Popen(
        [
            sys.executable, "-m", "rulediff", "serve",
            "--survivors", str(GOLDEN / "expected" / "survivors.json"),
            "--inconsistencies", str(GOLDEN / "expected" / "inconsistencies.jsonl"),
            "--catalog-a", str(GOLDEN / "inputs" / "catalog_a.json"),
            "--catalog-b", str(GOLDEN / "inputs" / "catalog_b.json"),
            "--source-dir", str(source_root),
            "--verdict-log", str(log),
            "--port", str(PORT),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        wait_for_server()
        print(f"recording into {OUT}/")

        save("health.json", get("/health"))
        save("patterns.json", get("/patterns"))

        candidates = get("/candidates?page=1&size=50")
        save("initial/candidates.json", candidates)
        save("initial/progress.json", get("/progress"))
        save("initial/report.json", get("/report"))
        save("initial/inconsistencies.json", get("/inconsistencies?page=1&size=50"))

        # Accept the first pending pair.
        accepted = candidates["items"][0]["id"]
        accept_resp = post(
            f"/candidates/{accepted}/verdict",
            {"reviewer": REVIEWER, "verdict": "accept"},
        )
        save("accept/response.json", accept_resp)
        # A duplicate click: the log gains a row but the state is the same.
        dup = post(
            f"/candidates/{accepted}/verdict",
            {"reviewer": REVIEWER, "verdict": "accept"},
        )
        save("accept/response_dup.json", dup)
        save("after_accept/candidates_pending.json",
             get("/candidates?page=1&size=50&status=pending"))
        save("after_accept/progress.json", get("/progress"))
        save("after_accept/report.json", get("/report"))

        # Label three inconsistencies of one rule as a false positive with
        # pattern P12. warned_by side_b_only puts the blame on the b-side
        # rule, so all three group under a single finding. Snapshot after
        # every step: the UI refreshes after each submit.
        incs = get("/inconsistencies?page=1&size=50")["items"]
        one_sided_b = [i for i in incs if i["warned_by"] == "side_b_only"]
        target_rule = one_sided_b[0]["rule_b"]["rule_id"]
        chosen = [
            i for i in one_sided_b if i["rule_b"]["rule_id"] == target_rule
        ][:3]
        assert len(chosen) == 3, f"need 3 inconsistencies of rule {target_rule}"
        label_resps = []
        for step, inc in enumerate(chosen, start=1):
            label_resps.append(post(
                f"/inconsistencies/{inc['id']}/label",
                {"reviewer": REVIEWER, "verdict": "false_positive", "pattern": "P12"},
            ))
            save(f"labels/step{step}/inconsistencies.json",
                 get("/inconsistencies?page=1&size=50"))
            save(f"labels/step{step}/progress.json", get("/progress"))
            save(f"labels/step{step}/report.json", get("/report"))
        save("labels/responses.json", label_resps)
        pair_of_labeled = chosen[0]["pair_id"]
        save("after_labels/inconsistencies_pair.json",
             get(f"/inconsistencies?pair={pair_of_labeled}&page=1&size=50"))
        save("after_labels/progress.json", get("/progress"))
        save("after_labels/report.json", get("/report"))

        save("meta.json", {
            "reviewer": REVIEWER,
            "accepted_pair": accepted,
            "labeled_rule": chosen[0]["rule_b"],
            "labeled_ids": [i["id"] for i in chosen],
            "labeled_pair": pair_of_labeled,
        })
    finally:
        server.terminate()
        server.wait(timeout=10)

    # The same log, aggregated directly by the backend library. The UI
    # round-trip test checks the dashboard numbers against this file.
    survivors = json.loads(
        (GOLDEN / "expected" / "survivors.json").read_text()
    )["pairs"]
    inconsistencies = [
        InconsistencyRecord.from_obj(o)
        for o in load_jsonl(GOLDEN / "expected" / "inconsistencies.jsonl")
    ]
    store = build_store(survivors, inconsistencies, log_path=log)
    save("summarize_findings.json", summarize_findings(store, inconsistencies))
    print("done")


if __name__ == "__main__":
    main()
