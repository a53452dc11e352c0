"""Human review of candidate pairs and inconsistencies.

Reviewers submit verdicts. Pairs take accept/reject; inconsistencies take a
bug category, not_a_bug, or undecided, optionally with a failure-pattern
label. The store keeps one effective verdict per (subject, reviewer), last
write wins, with the full history retained in an append-only JSONL log.

Inter-rater agreement is measured with Cohen's kappa, and confirmed labels
roll up into per-rule findings tables.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .catalog import RuleKey
from .diffing import SIDE_A_ONLY, InconsistencyRecord
from .errors import SubjectNotFoundError, ValidationError

PAIR_VERDICTS = ("accept", "reject")
BUG_VERDICTS = ("false_negative_impl", "false_negative_def", "false_positive")
INCONSISTENCY_VERDICTS = BUG_VERDICTS + ("not_a_bug", "undecided")

CATEGORY_BY_VERDICT = {
    "false_negative_impl": "FN_implementation",
    "false_negative_def": "FN_definition",
    "false_positive": "FP",
}
CATEGORIES = tuple(CATEGORY_BY_VERDICT.values())

# Failure-pattern taxonomy used when labeling inconsistencies.
PATTERN_LABELS = {
    "P1": "Fail in special data type",
    "P2": "Fail in compound expression",
    "P3": "Fail in implicit operation",
    "P4": "Fail in multiple calling operations",
    "P5": "Fail in separated expressions",
    "P6": "Fail in unnecessary brackets",
    "P7": "Fail in variables",
    "P8": "Miss comparable method",
    "P9": "Miss comparable data type or operation",
    "P10": "Miss subclass or superclass",
    "P11": "Poor handling of method with same name",
    "P12": "Setting over-sized scope",
    "P13": "Neglecting corner case",
    "other": "Other",
}

SUBJECT_PAIR = "pair"
SUBJECT_INCONSISTENCY = "inconsistency"

FINDING_STATUSES = ("reported", "awaiting", "confirmed_fixed")


@dataclass(frozen=True)
class TriageVerdict:
    subject: str
    reviewer: str
    verdict: str
    pattern: str | None = None
    note: str = ""
    ts: str | None = None

    def to_obj(self) -> dict:
        return {
            "subject": self.subject,
            "reviewer": self.reviewer,
            "verdict": self.verdict,
            "pattern": self.pattern,
            "note": self.note,
            "ts": self.ts,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "TriageVerdict":
        return cls(
            subject=obj["subject"],
            reviewer=obj["reviewer"],
            verdict=obj["verdict"],
            pattern=obj.get("pattern"),
            note=obj.get("note", ""),
            ts=obj.get("ts"),
        )


def _validate_verdict(kind: str, verdict: TriageVerdict) -> None:
    if not verdict.reviewer:
        raise ValidationError("verdict needs a reviewer", fields=["reviewer"])
    if kind == SUBJECT_PAIR:
        if verdict.verdict not in PAIR_VERDICTS:
            raise ValidationError(
                f"pair verdict must be one of {PAIR_VERDICTS}, got {verdict.verdict!r}",
                fields=["verdict"],
            )
        if verdict.pattern is not None:
            raise ValidationError(
                "pair verdicts do not take a pattern", fields=["pattern"]
            )
        return
    if verdict.verdict not in INCONSISTENCY_VERDICTS:
        raise ValidationError(
            f"inconsistency verdict must be one of {INCONSISTENCY_VERDICTS}, "
            f"got {verdict.verdict!r}",
            fields=["verdict"],
        )
    if verdict.pattern is not None:
        if verdict.verdict not in BUG_VERDICTS:
            raise ValidationError(
                "a pattern is only allowed on bug verdicts", fields=["pattern"]
            )
        if verdict.pattern not in PATTERN_LABELS:
            raise ValidationError(
                f"unknown pattern {verdict.pattern!r}", fields=["pattern"]
            )


class TriageStore:
    """Verdict log plus derived per-subject state.

    Subjects must be registered (from the survivors and inconsistencies
    files) before verdicts on them are accepted. When a log path is set,
    every recorded verdict is appended to it as one JSON line.
    """

    def __init__(self, log_path: str | Path | None = None):
        self.log_path = Path(log_path) if log_path else None
        self.subjects: dict[str, str] = {}
        self.history: list[TriageVerdict] = []
        self.latest: dict[tuple[str, str], TriageVerdict] = {}

    def register_pair(self, subject_id: str) -> None:
        self.subjects[subject_id] = SUBJECT_PAIR

    def register_inconsistency(self, subject_id: str) -> None:
        self.subjects[subject_id] = SUBJECT_INCONSISTENCY

    def subject_ids(self, kind: str) -> list[str]:
        return [s for s, k in self.subjects.items() if k == kind]

    def record_verdict(self, verdict: TriageVerdict, *, persist: bool = True) -> TriageVerdict:
        """Validate and store one verdict; later verdicts by the same
        reviewer on the same subject supersede earlier ones."""
        kind = self.subjects.get(verdict.subject)
        if kind is None:
            raise SubjectNotFoundError(f"unknown subject {verdict.subject!r}")
        _validate_verdict(kind, verdict)
        if verdict.ts is None:
            stamped = TriageVerdict(
                subject=verdict.subject,
                reviewer=verdict.reviewer,
                verdict=verdict.verdict,
                pattern=verdict.pattern,
                note=verdict.note,
                ts=datetime.now(timezone.utc).isoformat(),
            )
        else:
            stamped = verdict
        self.history.append(stamped)
        self.latest[(stamped.subject, stamped.reviewer)] = stamped
        if persist and self.log_path:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(stamped.to_obj(), sort_keys=True) + "\n")
        return stamped

    def replay(self, path: str | Path, *, ignore_unknown: bool = False) -> int:
        """Load verdicts from an existing log without re-appending them.

        With ``ignore_unknown`` verdicts on unregistered subjects are
        skipped instead of raising; a shared log legitimately covers
        subjects a single stage has not registered (e.g. inconsistency
        labels replayed while selecting confirmed pairs).
        """
        count = 0
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(
                        f"{path}:{lineno}: invalid JSON: {exc.msg}"
                    ) from None
                verdict = TriageVerdict.from_obj(obj)
                if ignore_unknown and verdict.subject not in self.subjects:
                    continue
                self.record_verdict(verdict, persist=False)
                count += 1
        return count

    def verdicts_for(self, subject_id: str) -> list[TriageVerdict]:
        return [
            v for (subject, _), v in self.latest.items() if subject == subject_id
        ]

    def pair_status(self, subject_id: str) -> str:
        """Consensus over the reviewers who voted: unanimous accept is
        confirmed, unanimous reject is rejected, anything mixed needs
        discussion, and no votes yet is pending."""
        votes = [v.verdict for v in self.verdicts_for(subject_id)]
        if not votes:
            return "pending"
        if all(v == "accept" for v in votes):
            return "confirmed"
        if all(v == "reject" for v in votes):
            return "rejected"
        return "needs_discussion"

    def inconsistency_label(self, subject_id: str) -> tuple[str, str | None] | None:
        """Effective (verdict, pattern) when all voters agree on both and the
        verdict is not undecided; otherwise None."""
        votes = self.verdicts_for(subject_id)
        if not votes:
            return None
        labels = {(v.verdict, v.pattern) for v in votes}
        if len(labels) != 1:
            return None
        verdict, pattern = next(iter(labels))
        if verdict == "undecided":
            return None
        return (verdict, pattern)

    def confirmed_pairs(self) -> list[str]:
        return [
            s for s in self.subject_ids(SUBJECT_PAIR) if self.pair_status(s) == "confirmed"
        ]

    def progress(self) -> dict:
        pair_counts = Counter(
            self.pair_status(s) for s in self.subject_ids(SUBJECT_PAIR)
        )
        inc_ids = self.subject_ids(SUBJECT_INCONSISTENCY)
        labeled = bug = not_a_bug = 0
        for subject in inc_ids:
            label = self.inconsistency_label(subject)
            if label is None:
                continue
            labeled += 1
            if label[0] == "not_a_bug":
                not_a_bug += 1
            else:
                bug += 1
        return {
            "pairs": {
                "total": len(self.subject_ids(SUBJECT_PAIR)),
                "pending": pair_counts.get("pending", 0),
                "confirmed": pair_counts.get("confirmed", 0),
                "rejected": pair_counts.get("rejected", 0),
                "needs_discussion": pair_counts.get("needs_discussion", 0),
            },
            "inconsistencies": {
                "total": len(inc_ids),
                "labeled": labeled,
                "bug": bug,
                "not_a_bug": not_a_bug,
                "open": len(inc_ids) - labeled,
            },
        }


def cohen_kappa(
    r1: Mapping[str, str],
    r2: Mapping[str, str],
    categories: Sequence[str] | None = None,
) -> float:
    """Cohen's kappa between two raters.

    kappa = (p_o - p_e) / (1 - p_e), with p_o the observed agreement rate
    and p_e the agreement expected from the raters' marginal label
    distributions. Both inputs map subject to label over the same subjects.
    When p_e is 1 both raters are concentrated on one identical label, so
    agreement is perfect and 1.0 comes back.
    """
    if set(r1) != set(r2):
        raise ValidationError("raters must label the same subjects")
    n = len(r1)
    if n < 2:
        raise ValidationError("kappa needs at least two subjects")
    labels1 = [r1[s] for s in r1]
    labels2 = [r2[s] for s in r1]
    if categories is None:
        cats = sorted(set(labels1) | set(labels2))
    else:
        cats = list(categories)
        stray = (set(labels1) | set(labels2)) - set(cats)
        if stray:
            raise ValidationError(f"labels outside the category set: {sorted(stray)}")
    count1 = Counter(labels1)
    count2 = Counter(labels2)
    p_o = sum(1 for a, b in zip(labels1, labels2) if a == b) / n
    p_e = math.fsum((count1[c] / n) * (count2[c] / n) for c in cats)
    if 1.0 - p_e == 0.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def kappa_from_confusion(table: Sequence[Sequence[float]]) -> float:
    """Cohen's kappa from a square confusion matrix (rows: rater 1)."""
    size = len(table)
    if size == 0 or any(len(row) != size for row in table):
        raise ValidationError("confusion matrix must be square and nonempty")
    n = math.fsum(value for row in table for value in row)
    if n <= 0:
        raise ValidationError("confusion matrix must have a positive total")
    p_o = math.fsum(table[i][i] for i in range(size)) / n
    p_e = math.fsum(
        (math.fsum(table[i]) / n) * (math.fsum(row[i] for row in table) / n)
        for i in range(size)
    )
    if 1.0 - p_e == 0.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def buggy_rule_of(inc: InconsistencyRecord, verdict: str) -> RuleKey:
    """The rule at fault: for a false positive the side that warned, for a
    false negative the side that stayed silent."""
    warner = inc.rule_a if inc.warned_by == SIDE_A_ONLY else inc.rule_b
    silent = inc.rule_b if inc.warned_by == SIDE_A_ONLY else inc.rule_a
    return warner if verdict == "false_positive" else silent


@dataclass(frozen=True)
class BugFinding:
    tool_id: str
    rule_id: str
    category: str  # FN_implementation | FN_definition | FP
    pattern: str
    occurrence_count: int
    status: str = "reported"

    def to_obj(self) -> dict:
        return {
            "tool": self.tool_id,
            "rule_id": self.rule_id,
            "category": self.category,
            "pattern": self.pattern,
            "pattern_label": PATTERN_LABELS.get(self.pattern, self.pattern),
            "occurrences": self.occurrence_count,
            "status": self.status,
        }


def summarize_findings(
    store: TriageStore,
    inconsistencies: Iterable[InconsistencyRecord],
    statuses: Mapping[tuple[str, str, str, str], str] | None = None,
) -> dict:
    """Findings tables plus the review funnel.

    Every inconsistency whose effective verdict is a bug category becomes an
    occurrence of the finding (buggy rule, category, pattern); verdicts
    without a pattern group under "other". Occurrence counts across the
    tables sum to the number of bug-labeled inconsistencies. ``statuses``
    optionally overrides the per-finding status, keyed by
    (tool, rule_id, category, pattern).
    """
    statuses = dict(statuses or {})
    groups: dict[tuple[str, str, str, str], int] = {}
    for inc in inconsistencies:
        label = store.inconsistency_label(inc.id)
        if label is None:
            continue
        verdict, pattern = label
        if verdict not in BUG_VERDICTS:
            continue
        tool, rule_id = buggy_rule_of(inc, verdict)
        key = (tool, rule_id, CATEGORY_BY_VERDICT[verdict], pattern or "other")
        groups[key] = groups.get(key, 0) + 1

    findings = [
        BugFinding(
            tool_id=tool,
            rule_id=rule_id,
            category=category,
            pattern=pattern,
            occurrence_count=count,
            status=statuses.get((tool, rule_id, category, pattern), "reported"),
        )
        for (tool, rule_id, category, pattern), count in groups.items()
    ]
    findings.sort(key=lambda f: (-f.occurrence_count, f.tool_id, f.rule_id, f.pattern))

    tables = {category: [] for category in CATEGORIES}
    for finding in findings:
        tables[finding.category].append(finding.to_obj())

    by_tool: dict[str, dict[str, int]] = {}
    for finding in findings:
        row = by_tool.setdefault(
            finding.tool_id,
            {"FN_implementation": 0, "FN_definition": 0, "FP": 0, "overall": 0},
        )
        row[finding.category] += 1
        row["overall"] += 1

    return {
        "funnel": store.progress(),
        "findings": tables,
        "by_tool": {tool: by_tool[tool] for tool in sorted(by_tool)},
    }


def render_report_text(report: dict) -> str:
    """Plain-text rendering of a findings report."""
    lines: list[str] = []
    funnel = report["funnel"]
    lines.append("Review funnel")
    lines.append(
        "  pairs: {total} total, {pending} pending, {confirmed} confirmed, "
        "{rejected} rejected, {needs_discussion} needs discussion".format(**funnel["pairs"])
    )
    lines.append(
        "  inconsistencies: {total} total, {labeled} labeled "
        "({bug} bug, {not_a_bug} not a bug), {open} open".format(
            **funnel["inconsistencies"]
        )
    )
    titles = {
        "FN_implementation": "False negatives (rule implementation)",
        "FN_definition": "False negatives (rule definition)",
        "FP": "False positives",
    }
    for category in CATEGORIES:
        rows = report["findings"][category]
        lines.append("")
        lines.append(f"{titles[category]}: {len(rows)} finding(s)")
        for row in rows:
            lines.append(
                "  {pattern:>5}  {tool}:{rule_id}  x{occurrences}  [{status}]  {pattern_label}".format(**row)
            )
    if report["by_tool"]:
        lines.append("")
        lines.append("Findings per tool")
        for tool, row in report["by_tool"].items():
            lines.append(
                f"  {tool}: {row['FN_implementation']} FN-impl, "
                f"{row['FN_definition']} FN-def, {row['FP']} FP, "
                f"{row['overall']} overall"
            )
    return "\n".join(lines) + "\n"
