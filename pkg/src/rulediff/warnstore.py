"""Warning ingestion, indexing, and trigger statistics.

Warnings arrive as JSONL, one record per line. The store validates records
against the catalogs of the tools involved, optionally drops exact
duplicates, and freezes into an immutable index exposing per-rule warned
lines, warned files, and trigger counts.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .catalog import RuleCatalog, RuleKey
from .errors import UntriggeredRuleError, ValidationError, WarningFormatError

Location = tuple[str, str, int]  # (project, file, line)


@dataclass(frozen=True)
class MethodSpan:
    name: str
    start: int
    end: int

    def __post_init__(self):
        if not self.name:
            raise ValidationError("method span needs a name")
        if self.start < 1 or self.end < self.start:
            raise ValidationError(
                f"method span {self.name!r} has invalid lines {self.start}..{self.end}"
            )

    def to_obj(self) -> dict:
        return {"name": self.name, "start": self.start, "end": self.end}

    @classmethod
    def from_obj(cls, obj: dict) -> "MethodSpan":
        return cls(name=obj["name"], start=obj["start"], end=obj["end"])


@dataclass(frozen=True)
class WarningRecord:
    tool_id: str
    rule_id: str
    project_id: str
    file_path: str
    start_line: int
    end_line: int
    method_span: MethodSpan | None = None

    def __post_init__(self):
        for name in ("tool_id", "rule_id", "project_id", "file_path"):
            if not getattr(self, name):
                raise ValidationError(f"warning record is missing {name}")
        if not isinstance(self.start_line, int) or not isinstance(self.end_line, int):
            raise ValidationError("start_line and end_line must be integers")
        if self.start_line < 1:
            raise ValidationError(f"start_line must be >= 1, got {self.start_line}")
        if self.end_line < self.start_line:
            raise ValidationError(
                f"end_line {self.end_line} precedes start_line {self.start_line}"
            )
        span = self.method_span
        if span is not None and not (span.start <= self.start_line <= span.end):
            raise ValidationError(
                f"warning at line {self.start_line} lies outside its method span "
                f"{span.name!r} ({span.start}..{span.end})"
            )

    @property
    def key(self) -> RuleKey:
        return (self.tool_id, self.rule_id)

    def lines(self) -> range:
        return range(self.start_line, self.end_line + 1)

    @classmethod
    def from_obj(cls, obj: dict) -> "WarningRecord":
        if not isinstance(obj, dict):
            raise ValidationError("warning record must be an object")
        for key in ("tool", "rule_id", "project", "file", "start_line", "end_line"):
            if key not in obj:
                raise ValidationError(f"warning record is missing field {key!r}")
        method = obj.get("method")
        span = MethodSpan.from_obj(method) if method else None
        return cls(
            tool_id=obj["tool"],
            rule_id=obj["rule_id"],
            project_id=obj["project"],
            file_path=obj["file"],
            start_line=obj["start_line"],
            end_line=obj["end_line"],
            method_span=span,
        )

    def to_obj(self) -> dict:
        return {
            "tool": self.tool_id,
            "rule_id": self.rule_id,
            "project": self.project_id,
            "file": self.file_path,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "method": self.method_span.to_obj() if self.method_span else None,
        }


@dataclass
class RejectedWarning:
    reason: str
    record: dict
    line_no: int | None = None


@dataclass
class IngestResult:
    accepted: int
    rejected: list[RejectedWarning]


@dataclass(frozen=True)
class WarningIndex:
    """Immutable snapshot of the store, safe to share between readers."""

    by_rule: Mapping[RuleKey, tuple[WarningRecord, ...]]
    warned_lines: Mapping[RuleKey, frozenset[Location]]
    warned_files: Mapping[RuleKey, frozenset[tuple[str, str]]]
    trigger_count: Mapping[RuleKey, int]

    def triggered(self, rule: RuleKey) -> bool:
        return rule in self.by_rule

    def count(self, rule: RuleKey) -> int:
        return self.trigger_count.get(rule, 0)

    def lines(self, rule: RuleKey) -> frozenset[Location]:
        return self.warned_lines.get(rule, frozenset())

    def files(self, rule: RuleKey) -> frozenset[tuple[str, str]]:
        return self.warned_files.get(rule, frozenset())

    def records(self, rule: RuleKey) -> tuple[WarningRecord, ...]:
        return self.by_rule.get(rule, ())


class WarningStore:
    """Mutable accumulator for warning records.

    With ``dedup`` (the default) ingesting the exact same record twice keeps
    a single copy, so re-running an ingest is idempotent. With dedup off the
    store is purely additive.
    """

    def __init__(self, dedup: bool = True):
        self.dedup = dedup
        self._records: list[WarningRecord] = []
        self._seen: set[WarningRecord] = set()

    def __len__(self) -> int:
        return len(self._records)

    @staticmethod
    def _known_rules(catalogs: Iterable[RuleCatalog]) -> set[RuleKey]:
        known: set[RuleKey] = set()
        for catalog in catalogs:
            known.update(catalog.rule_keys())
        return known

    def _add(self, record: WarningRecord) -> None:
        if self.dedup:
            if record in self._seen:
                return
            self._seen.add(record)
        self._records.append(record)

    def ingest_records(
        self, records: Iterable[WarningRecord], *catalogs: RuleCatalog
    ) -> IngestResult:
        known = self._known_rules(catalogs)
        accepted = 0
        rejected: list[RejectedWarning] = []
        for record in records:
            if record.key not in known:
                rejected.append(
                    RejectedWarning(
                        reason=f"unknown rule {record.tool_id}:{record.rule_id}",
                        record=record.to_obj(),
                    )
                )
                continue
            self._add(record)
            accepted += 1
        return IngestResult(accepted=accepted, rejected=rejected)

    def ingest(self, path: str | Path, *catalogs: RuleCatalog) -> IngestResult:
        """Parse one JSONL file. Structural problems raise, naming the line;
        records whose rule is unknown to every catalog land in the reject
        list instead of being dropped silently."""
        known = self._known_rules(catalogs)
        accepted = 0
        rejected: list[RejectedWarning] = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise WarningFormatError(
                        f"{path}:{lineno}: invalid JSON: {exc.msg}"
                    ) from None
                try:
                    record = WarningRecord.from_obj(obj)
                except ValidationError as exc:
                    raise ValidationError(f"{path}:{lineno}: {exc}") from None
                if record.key not in known:
                    rejected.append(
                        RejectedWarning(
                            reason=f"unknown rule {record.tool_id}:{record.rule_id}",
                            record=obj,
                            line_no=lineno,
                        )
                    )
                    continue
                self._add(record)
                accepted += 1
        return IngestResult(accepted=accepted, rejected=rejected)

    def freeze(self) -> WarningIndex:
        """Build the immutable index. The store stays usable; later freezes
        see later ingests, earlier snapshots never change."""
        by_rule: dict[RuleKey, list[WarningRecord]] = {}
        warned_lines: dict[RuleKey, set[Location]] = {}
        warned_files: dict[RuleKey, set[tuple[str, str]]] = {}
        for record in self._records:
            by_rule.setdefault(record.key, []).append(record)
            lines = warned_lines.setdefault(record.key, set())
            for line in record.lines():
                lines.add((record.project_id, record.file_path, line))
            warned_files.setdefault(record.key, set()).add(
                (record.project_id, record.file_path)
            )
        return WarningIndex(
            by_rule={k: tuple(v) for k, v in by_rule.items()},
            warned_lines={k: frozenset(v) for k, v in warned_lines.items()},
            warned_files={k: frozenset(v) for k, v in warned_files.items()},
            trigger_count={k: len(v) for k, v in by_rule.items()},
        )


def line_overlap(
    rule_a: RuleKey, rule_b: RuleKey, index: WarningIndex
) -> tuple[float, float]:
    """Shared warned lines as a fraction of each rule's own warned lines."""
    for rule in (rule_a, rule_b):
        if not index.triggered(rule):
            raise UntriggeredRuleError(
                f"rule {rule[0]}:{rule[1]} has no warnings; line overlap is undefined"
            )
    lines_a = index.lines(rule_a)
    lines_b = index.lines(rule_b)
    shared = len(lines_a & lines_b)
    return (shared / len(lines_a), shared / len(lines_b))


def file_overlap(rule_a: RuleKey, rule_b: RuleKey, index: WarningIndex) -> float:
    """Jaccard overlap of the (project, file) sets the two rules warned in."""
    for rule in (rule_a, rule_b):
        if not index.triggered(rule):
            raise UntriggeredRuleError(
                f"rule {rule[0]}:{rule[1]} has no warnings; file overlap is undefined"
            )
    files_a = index.files(rule_a)
    files_b = index.files(rule_b)
    union = files_a | files_b
    return len(files_a & files_b) / len(union)


@dataclass(frozen=True)
class RuleStats:
    tool_id: str
    total_rules: int
    triggered_rules: int
    pct_triggered: float
    # (min, q1, median, q3, max) of trigger counts over triggered rules.
    quartiles: tuple[float, float, float, float, float]

    def to_obj(self) -> dict:
        low, q1, median, q3, high = self.quartiles
        return {
            "tool": self.tool_id,
            "total_rules": self.total_rules,
            "triggered_rules": self.triggered_rules,
            "pct_triggered": self.pct_triggered,
            "trigger_quartiles": {
                "min": low,
                "q1": q1,
                "median": median,
                "q3": q3,
                "max": high,
            },
        }


def compute_stats(index: WarningIndex, catalog: RuleCatalog) -> RuleStats:
    """Trigger coverage and quartiles for one catalog.

    Quartiles are computed over triggered rules only, with linear
    interpolation between closest ranks.
    """
    if len(catalog) == 0:
        raise ValidationError(f"catalog {catalog.tool_id} is empty")
    if not index.by_rule:
        raise ValidationError("warning index is empty")
    counts = sorted(
        index.count(key) for key in catalog.rule_keys() if index.triggered(key)
    )
    if not counts:
        raise ValidationError(
            f"no rule of {catalog.tool_id} triggered; quartiles are undefined"
        )
    q1, median, q3 = np.percentile(counts, [25, 50, 75], method="linear")
    return RuleStats(
        tool_id=catalog.tool_id,
        total_rules=len(catalog),
        triggered_rules=len(counts),
        pct_triggered=len(counts) / len(catalog),
        quartiles=(
            float(counts[0]),
            float(q1),
            float(median),
            float(q3),
            float(counts[-1]),
        ),
    )
