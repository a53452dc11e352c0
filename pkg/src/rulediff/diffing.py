"""Inconsistency detection between the two rules of a confirmed pair.

Two comparison criteria exist. At line granularity a location warned by
exactly one rule is an inconsistency; locations are span-expanded warned
lines. At method granularity every warning resolves to its enclosing
method first, so a rule marking a whole method and a rule marking a single
line inside it agree. A pair compares at method granularity as soon as at
least one side is method-granular.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .catalog import RuleKey
from .errors import (
    ConfigError,
    GranularityError,
    UnresolvedLocationError,
    ValidationError,
)
from .mapper import PairCandidate
from .warnstore import MethodSpan, WarningIndex, WarningRecord

GRANULARITIES = ("line", "method")

SIDE_A_ONLY = "side_a_only"
SIDE_B_ONLY = "side_b_only"

# Identity of a method for agreement purposes: where it lives, not what the
# reporting tool calls it.
MethodKey = tuple[str, str, int, int]  # (project, file, start, end)


@dataclass(frozen=True)
class PairGranularity:
    side_a: str
    side_b: str

    def __post_init__(self):
        for side in (self.side_a, self.side_b):
            if side not in GRANULARITIES:
                raise GranularityError(f"unknown granularity {side!r}")

    @property
    def criterion(self) -> str:
        return "method" if "method" in (self.side_a, self.side_b) else "line"


class GranularityMap:
    """Per-rule granularity lookup.

    With a default granularity (the usual setup) unlisted rules resolve to
    it; constructed with ``default=None`` the map is strict and an unlisted
    rule is a configuration error.
    """

    def __init__(
        self,
        rules: Mapping[RuleKey, str] | None = None,
        default: str | None = "line",
    ):
        if default is not None and default not in GRANULARITIES:
            raise ConfigError(f"unknown default granularity {default!r}")
        self.default = default
        self.rules: dict[RuleKey, str] = {}
        for key, value in (rules or {}).items():
            if value not in GRANULARITIES:
                raise ConfigError(
                    f"unknown granularity {value!r} for rule {key[0]}:{key[1]}"
                )
            self.rules[key] = value

    def granularity_of(self, rule: RuleKey) -> str:
        if rule in self.rules:
            return self.rules[rule]
        if self.default is None:
            raise ConfigError(
                f"rule {rule[0]}:{rule[1]} is missing from the granularity map"
            )
        return self.default

    def for_pair(self, pair: PairCandidate) -> PairGranularity:
        return PairGranularity(
            side_a=self.granularity_of(pair.rule_a),
            side_b=self.granularity_of(pair.rule_b),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "GranularityMap":
        """Read {"default": "line", "rules": {"tool:rule_id": "method"}}."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc.msg}") from None
        rules: dict[RuleKey, str] = {}
        for key, value in data.get("rules", {}).items():
            tool, sep, rule_id = key.partition(":")
            if not sep or not tool or not rule_id:
                raise ConfigError(
                    f"{path}: granularity key {key!r} must look like 'tool:rule_id'"
                )
            rules[(tool, rule_id)] = value
        return cls(rules=rules, default=data.get("default", "line"))


@dataclass(frozen=True)
class MethodSpanIndex:
    """Method spans per (project, file), for resolving warning lines.

    Spans may nest; lookup returns the innermost span containing the line.
    """

    spans: Mapping[tuple[str, str], tuple[MethodSpan, ...]]

    @classmethod
    def empty(cls) -> "MethodSpanIndex":
        return cls(spans={})

    @classmethod
    def from_entries(cls, entries: Iterable[dict]) -> "MethodSpanIndex":
        spans: dict[tuple[str, str], list[MethodSpan]] = {}
        for entry in entries:
            for key in ("project", "file", "methods"):
                if key not in entry:
                    raise ValidationError(f"span entry is missing field {key!r}")
            bucket = spans.setdefault((entry["project"], entry["file"]), [])
            for m in entry["methods"]:
                bucket.append(MethodSpan.from_obj(m))
        return cls(
            spans={
                key: tuple(sorted(group, key=lambda s: (s.start, s.end, s.name)))
                for key, group in spans.items()
            }
        )

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "MethodSpanIndex":
        entries = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entries.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ValidationError(
                        f"{path}:{lineno}: invalid JSON: {exc.msg}"
                    ) from None
        return cls.from_entries(entries)

    def innermost(self, project: str, file: str, line: int) -> MethodSpan | None:
        best: MethodSpan | None = None
        for span in self.spans.get((project, file), ()):
            if span.start <= line <= span.end:
                if best is None or (span.start, -span.end) > (best.start, -best.end):
                    best = span
        return best


def resolve_method(
    record: WarningRecord, spans: MethodSpanIndex
) -> tuple[str, str, MethodSpan]:
    """Enclosing method of a warning: the record's own span when present,
    otherwise the innermost indexed span containing its start line."""
    if record.method_span is not None:
        return (record.project_id, record.file_path, record.method_span)
    span = spans.innermost(record.project_id, record.file_path, record.start_line)
    if span is None:
        raise UnresolvedLocationError(
            f"no enclosing method for {record.tool_id}:{record.rule_id} at "
            f"{record.project_id}/{record.file_path}:{record.start_line}"
        )
    return (record.project_id, record.file_path, span)


@dataclass(frozen=True)
class InconsistencyRecord:
    pair_id: str
    rule_a: RuleKey
    rule_b: RuleKey
    project_id: str
    file_path: str
    criterion: str  # line | method
    warned_by: str  # side_a_only | side_b_only
    line: int | None = None
    method: MethodSpan | None = None

    def __post_init__(self):
        if self.criterion not in GRANULARITIES:
            raise ValidationError(f"unknown criterion {self.criterion!r}")
        if self.warned_by not in (SIDE_A_ONLY, SIDE_B_ONLY):
            raise ValidationError(f"unknown warned_by {self.warned_by!r}")
        if (self.criterion == "line") != (self.line is not None):
            raise ValidationError("line criterion requires a line and nothing else")
        if (self.criterion == "method") != (self.method is not None):
            raise ValidationError("method criterion requires a method span")

    @property
    def location_key(self) -> tuple:
        if self.criterion == "line":
            return (self.line,)
        return (self.method.start, self.method.end, self.method.name)

    @property
    def sort_key(self) -> tuple:
        return (
            self.pair_id,
            self.project_id,
            self.file_path,
            self.location_key,
            self.warned_by,
        )

    @property
    def id(self) -> str:
        raw = "|".join(
            (
                self.pair_id,
                self.project_id,
                self.file_path,
                self.criterion,
                ",".join(str(part) for part in self.location_key),
                self.warned_by,
            )
        )
        return "inc-" + hashlib.sha1(raw.encode("utf-8")).hexdigest()[:12]

    def to_obj(self) -> dict:
        location = (
            {"line": self.line}
            if self.criterion == "line"
            else {"method": self.method.to_obj()}
        )
        return {
            "id": self.id,
            "pair_id": self.pair_id,
            "rule_a": {"tool": self.rule_a[0], "rule_id": self.rule_a[1]},
            "rule_b": {"tool": self.rule_b[0], "rule_id": self.rule_b[1]},
            "project": self.project_id,
            "file": self.file_path,
            "criterion": self.criterion,
            "location": location,
            "warned_by": self.warned_by,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "InconsistencyRecord":
        location = obj["location"]
        return cls(
            pair_id=obj["pair_id"],
            rule_a=(obj["rule_a"]["tool"], obj["rule_a"]["rule_id"]),
            rule_b=(obj["rule_b"]["tool"], obj["rule_b"]["rule_id"]),
            project_id=obj["project"],
            file_path=obj["file"],
            criterion=obj["criterion"],
            warned_by=obj["warned_by"],
            line=location.get("line"),
            method=(
                MethodSpan.from_obj(location["method"])
                if "method" in location
                else None
            ),
        )


def diff_pair_line(
    pair: PairCandidate,
    index: WarningIndex,
    granularity: PairGranularity | None = None,
) -> list[InconsistencyRecord]:
    """Locations warned by exactly one side, over span-expanded lines."""
    if granularity is not None and granularity.criterion != "line":
        raise GranularityError(
            f"pair {pair.id} is not line-granular on both sides"
        )
    lines_a = index.lines(pair.rule_a)
    lines_b = index.lines(pair.rule_b)
    records = []
    for warned_by, only in (
        (SIDE_A_ONLY, lines_a - lines_b),
        (SIDE_B_ONLY, lines_b - lines_a),
    ):
        for project, file, line in only:
            records.append(
                InconsistencyRecord(
                    pair_id=pair.id,
                    rule_a=pair.rule_a,
                    rule_b=pair.rule_b,
                    project_id=project,
                    file_path=file,
                    criterion="line",
                    warned_by=warned_by,
                    line=line,
                )
            )
    return sorted(records, key=lambda r: r.sort_key)


def diff_pair_method(
    pair: PairCandidate,
    index: WarningIndex,
    spans: MethodSpanIndex | None = None,
    granularity: PairGranularity | None = None,
) -> list[InconsistencyRecord]:
    """Methods warned by exactly one side.

    Method identity is the (project, file, span) triple, so differently
    named reports of the same extent agree. Every warning must resolve to a
    method, via its own span or the span index.
    """
    if granularity is not None and granularity.criterion != "method":
        raise GranularityError(f"pair {pair.id} has no method-granular side")
    spans = spans or MethodSpanIndex.empty()

    def methods_of(rule: RuleKey) -> dict[MethodKey, MethodSpan]:
        out: dict[MethodKey, MethodSpan] = {}
        for record in index.records(rule):
            project, file, span = resolve_method(record, spans)
            out[(project, file, span.start, span.end)] = span
        return out

    methods_a = methods_of(pair.rule_a)
    methods_b = methods_of(pair.rule_b)
    records = []
    for warned_by, only, known in (
        (SIDE_A_ONLY, set(methods_a) - set(methods_b), methods_a),
        (SIDE_B_ONLY, set(methods_b) - set(methods_a), methods_b),
    ):
        for key in only:
            project, file, _start, _end = key
            records.append(
                InconsistencyRecord(
                    pair_id=pair.id,
                    rule_a=pair.rule_a,
                    rule_b=pair.rule_b,
                    project_id=project,
                    file_path=file,
                    criterion="method",
                    warned_by=warned_by,
                    method=known[key],
                )
            )
    return sorted(records, key=lambda r: r.sort_key)


def diff_all(
    pairs: Sequence[PairCandidate],
    index: WarningIndex,
    spans: MethodSpanIndex | None = None,
    granularity_map: GranularityMap | None = None,
) -> tuple[list[InconsistencyRecord], dict[str, int]]:
    """Diff every confirmed pair; returns (records, per-pair counts).

    Records come back sorted by (pair, project, file, location) so repeated
    runs serialize identically. Counts include zero entries for quiet pairs.
    """
    granularity_map = granularity_map or GranularityMap()
    records: list[InconsistencyRecord] = []
    counts: dict[str, int] = {}
    for pair in sorted(pairs, key=lambda p: p.sort_key):
        gran = granularity_map.for_pair(pair)
        if gran.criterion == "method":
            found = diff_pair_method(pair, index, spans, granularity=gran)
        else:
            found = diff_pair_line(pair, index, granularity=gran)
        counts[pair.id] = len(found)
        records.extend(found)
    return sorted(records, key=lambda r: r.sort_key), counts
