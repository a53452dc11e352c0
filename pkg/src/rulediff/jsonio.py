"""Canonical JSON writers.

All pipeline artifacts go through these helpers so that repeated runs over
identical inputs produce byte-identical files.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable


def dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dump_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(dumps_canonical(obj), encoding="utf-8")


def dumps_line(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def dump_jsonl(objs: Iterable[Any], path: str | Path) -> None:
    lines = [dumps_line(obj) for obj in objs]
    text = "\n".join(lines) + ("\n" if lines else "")
    Path(path).write_text(text, encoding="utf-8")


def load_jsonl(path: str | Path) -> list[Any]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out
