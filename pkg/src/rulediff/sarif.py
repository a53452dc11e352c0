"""SARIF v2.1.0 to warning-JSONL conversion.

Only the fields the harness needs are read: rule id, file URI, and region
lines. SARIF results rarely carry method extents, so the method field stays
null unless a logical location provides explicit start/end lines in its
properties bag; method spans normally arrive through the sidecar file
instead.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError


@dataclass
class SarifConversion:
    records: list[dict]
    skipped: int


def _method_from_location(location: dict) -> dict | None:
    for logical in location.get("logicalLocations", []) or []:
        kind = logical.get("kind")
        if kind not in ("function", "method", "member"):
            continue
        name = logical.get("fullyQualifiedName") or logical.get("name")
        props = logical.get("properties", {}) or {}
        start, end = props.get("startLine"), props.get("endLine")
        if name and isinstance(start, int) and isinstance(end, int):
            return {"name": name, "start": start, "end": end}
    return None


def convert_sarif(
    data: dict, project: str, tool: str | None = None
) -> SarifConversion:
    """Flatten a parsed SARIF document into warning-record objects.

    ``project`` fills the project field (SARIF has no equivalent); ``tool``
    overrides the driver name. Results without a rule id or a physical
    location with a start line are counted as skipped.
    """
    if not isinstance(data, dict):
        raise ValidationError("SARIF document must be an object")
    version = data.get("version")
    if version != "2.1.0":
        raise ValidationError(f"unsupported SARIF version {version!r}")
    runs = data.get("runs")
    if not isinstance(runs, list):
        raise ValidationError("SARIF document has no runs")
    records: list[dict] = []
    skipped = 0
    for run in runs:
        driver = (run.get("tool", {}) or {}).get("driver", {}) or {}
        run_tool = tool or driver.get("name")
        if not run_tool:
            raise ValidationError("SARIF run has no tool name and none was given")
        for result in run.get("results", []) or []:
            rule_id = result.get("ruleId")
            locations = result.get("locations") or []
            if not rule_id or not locations:
                skipped += 1
                continue
            location = locations[0]
            physical = location.get("physicalLocation", {}) or {}
            uri = (physical.get("artifactLocation", {}) or {}).get("uri")
            region = physical.get("region", {}) or {}
            start = region.get("startLine")
            if not uri or not isinstance(start, int):
                skipped += 1
                continue
            end = region.get("endLine", start)
            if not isinstance(end, int) or end < start:
                end = start
            records.append(
                {
                    "tool": run_tool,
                    "rule_id": rule_id,
                    "project": project,
                    "file": uri,
                    "start_line": start,
                    "end_line": end,
                    "method": _method_from_location(location),
                }
            )
    return SarifConversion(records=records, skipped=skipped)


def convert_sarif_file(
    path: str | Path, project: str, tool: str | None = None
) -> SarifConversion:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
        ) from None
    return convert_sarif(data, project=project, tool=tool)
