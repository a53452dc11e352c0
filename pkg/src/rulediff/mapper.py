"""Cross-tool rule pairing.

Candidates start from the full cross product of two catalogs and survive
four filters:

a. mutual top-N: the pair stays only if each rule ranks the other within
   its top N by combined description similarity;
b. one-to-one locking: when both line-overlap ratios reach the lock
   threshold the pair is locked and every other candidate touching either
   rule is removed; locked pairs skip the remaining filters;
c. trigger-volume filter: pairs whose trigger counts are too far apart are
   pruned (ratio test by default, absolute difference behind config);
d. file-overlap filter: pairs warning in nearly disjoint file sets are
   pruned.

Rules without any warning carry no evidence either way, so filters that
need warning data pass them through unexamined.
"""
from __future__ import annotations

import dataclasses
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .catalog import RuleCatalog, RuleKey
from .errors import ConfigError
from .similarity import (
    EmbeddingModel,
    SimilarityScores,
    build_tf_idf,
    description_similarity,
)
from .warnstore import WarningIndex, file_overlap, line_overlap

PairKey = tuple[RuleKey, RuleKey]

STAGE_AFTER_A = "after_a"
STAGE_LOCKED_B = "locked_b"
STAGE_AFTER_C = "after_c"
STAGE_AFTER_D = "after_d"
STAGE_PRUNED = "pruned"
STAGE_GROUND_TRUTH = "ground_truth"


def pair_id(rule_a: RuleKey, rule_b: RuleKey) -> str:
    raw = "|".join((*rule_a, *rule_b))
    return "pair-" + hashlib.sha1(raw.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class MappingConfig:
    top_n: int = 3
    lock_threshold: float = 0.80
    trigger_ratio_max: float = 20.0
    file_overlap_min: float = 0.02
    idf_log: bool = False
    # "ratio" prunes on max/min of trigger counts; "absolute" on |a - b|.
    trigger_mode: str = "ratio"

    def __post_init__(self):
        if self.top_n < 1:
            raise ConfigError(f"top_n must be >= 1, got {self.top_n}")
        if not (0.0 < self.lock_threshold <= 1.0):
            raise ConfigError(
                f"lock_threshold must be in (0, 1], got {self.lock_threshold}"
            )
        if self.trigger_ratio_max <= 1.0:
            raise ConfigError(
                f"trigger_ratio_max must exceed 1, got {self.trigger_ratio_max}"
            )
        if not (0.0 <= self.file_overlap_min <= 1.0):
            raise ConfigError(
                f"file_overlap_min must be in [0, 1], got {self.file_overlap_min}"
            )
        if self.trigger_mode not in ("ratio", "absolute"):
            raise ConfigError(
                f"trigger_mode must be 'ratio' or 'absolute', got {self.trigger_mode!r}"
            )

    @classmethod
    def from_obj(cls, obj: dict) -> "MappingConfig":
        allowed = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - allowed
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**obj)

    def to_obj(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class OverlapInfo:
    trigger_a: int
    trigger_b: int
    ratio_a: float | None = None
    ratio_b: float | None = None
    file_jaccard: float | None = None

    def to_obj(self) -> dict:
        return {
            "trigger_a": self.trigger_a,
            "trigger_b": self.trigger_b,
            "ratio_a": self.ratio_a,
            "ratio_b": self.ratio_b,
            "file_jaccard": self.file_jaccard,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "OverlapInfo":
        return cls(
            trigger_a=obj["trigger_a"],
            trigger_b=obj["trigger_b"],
            ratio_a=obj.get("ratio_a"),
            ratio_b=obj.get("ratio_b"),
            file_jaccard=obj.get("file_jaccard"),
        )


@dataclass(frozen=True)
class PairCandidate:
    rule_a: RuleKey
    rule_b: RuleKey
    scores: SimilarityScores | None = None
    stage: str = STAGE_AFTER_A
    overlap: OverlapInfo | None = None
    pruned_stage: str | None = None
    pruned_reason: str | None = None

    @property
    def key(self) -> PairKey:
        return (self.rule_a, self.rule_b)

    @property
    def id(self) -> str:
        return pair_id(self.rule_a, self.rule_b)

    @property
    def sort_key(self) -> PairKey:
        return (self.rule_a, self.rule_b)

    def to_obj(self) -> dict:
        return {
            "id": self.id,
            "rule_a": {"tool": self.rule_a[0], "rule_id": self.rule_a[1]},
            "rule_b": {"tool": self.rule_b[0], "rule_id": self.rule_b[1]},
            "scores": self.scores.to_obj() if self.scores else None,
            "stage": self.stage,
            "overlap": self.overlap.to_obj() if self.overlap else None,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "PairCandidate":
        return cls(
            rule_a=(obj["rule_a"]["tool"], obj["rule_a"]["rule_id"]),
            rule_b=(obj["rule_b"]["tool"], obj["rule_b"]["rule_id"]),
            scores=SimilarityScores.from_obj(obj["scores"]) if obj.get("scores") else None,
            stage=obj.get("stage", STAGE_AFTER_A),
            overlap=OverlapInfo.from_obj(obj["overlap"]) if obj.get("overlap") else None,
        )


@dataclass(frozen=True)
class MappingReport:
    """Funnel counts. Stage counts include locked pairs, which survive to
    the end; ``locked`` breaks the locked subset out separately."""

    total_candidates: int
    after_a: int
    after_b: int
    after_c: int
    after_d: int
    locked: int
    confirmed: int = 0

    def to_obj(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_obj(cls, obj: dict) -> "MappingReport":
        return cls(**obj)


def score_all_pairs(
    catalog_a: RuleCatalog,
    catalog_b: RuleCatalog,
    model: EmbeddingModel | None = None,
    config: MappingConfig | None = None,
    workers: int = 1,
) -> dict[PairKey, SimilarityScores]:
    """Similarity scores for the full cross product of the two catalogs.

    The TF-IDF corpus is the union of both catalogs, so document frequencies
    see every rule of both tools. Scoring one pair is independent of every
    other pair; with ``workers > 1`` pairs are scored in a thread pool and
    the result is identical to the sequential run.
    """
    config = config or MappingConfig()
    model = model or EmbeddingModel.empty()
    corpus = {rule.key: rule.text for rule in catalog_a}
    corpus.update({rule.key: rule.text for rule in catalog_b})
    tfidf = build_tf_idf(corpus, idf_log=config.idf_log)
    pairs = [(ra, rb) for ra in catalog_a.rules for rb in catalog_b.rules]

    def score_one(pair):
        ra, rb = pair
        return description_similarity(ra, rb, model, tfidf)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(score_one, pairs, chunksize=64))
    else:
        results = [score_one(pair) for pair in pairs]
    return {
        (ra.key, rb.key): scores for (ra, rb), scores in zip(pairs, results)
    }


def _top_n(
    scored: list[tuple[str, float]], n: int
) -> set[str]:
    """Ids of the n best partners; zero scores never qualify and ties at the
    boundary resolve by ascending rule id."""
    ranked = sorted(
        ((rule_id, score) for rule_id, score in scored if score > 0.0),
        key=lambda item: (-item[1], item[0]),
    )
    return {rule_id for rule_id, _ in ranked[:n]}


def stage_a_mutual_top_n(
    catalog_a: RuleCatalog,
    catalog_b: RuleCatalog,
    scores: Mapping[PairKey, SimilarityScores],
    config: MappingConfig,
) -> list[PairCandidate]:
    """Keep (a, b) only when b is in a's top N and a is in b's top N."""
    best_for_a: dict[str, set[str]] = {}
    for ra in catalog_a.rules:
        scored = [
            (rb.rule_id, scores[(ra.key, rb.key)].description_sim)
            for rb in catalog_b.rules
        ]
        best_for_a[ra.rule_id] = _top_n(scored, config.top_n)
    best_for_b: dict[str, set[str]] = {}
    for rb in catalog_b.rules:
        scored = [
            (ra.rule_id, scores[(ra.key, rb.key)].description_sim)
            for ra in catalog_a.rules
        ]
        best_for_b[rb.rule_id] = _top_n(scored, config.top_n)
    candidates = []
    for ra in catalog_a.rules:
        for rb in catalog_b.rules:
            if (
                rb.rule_id in best_for_a[ra.rule_id]
                and ra.rule_id in best_for_b[rb.rule_id]
            ):
                candidates.append(
                    PairCandidate(
                        rule_a=ra.key,
                        rule_b=rb.key,
                        scores=scores[(ra.key, rb.key)],
                        stage=STAGE_AFTER_A,
                    )
                )
    return sorted(candidates, key=lambda c: c.sort_key)


def _with_overlap(cand: PairCandidate, index: WarningIndex, **updates) -> PairCandidate:
    base = cand.overlap or OverlapInfo(
        trigger_a=index.count(cand.rule_a), trigger_b=index.count(cand.rule_b)
    )
    return dataclasses.replace(cand, overlap=dataclasses.replace(base, **updates))


def stage_b_lock_one_to_one(
    candidates: Sequence[PairCandidate],
    index: WarningIndex,
    config: MappingConfig,
) -> tuple[list[PairCandidate], list[PairCandidate], list[PairCandidate]]:
    """Lock pairs whose mutual line overlap is high on both sides.

    Qualifying pairs are processed by descending min(ratio_a, ratio_b), ties
    by pair id. Locking a pair removes every other candidate that mentions
    either rule. Pairs with an untriggered side pass through unexamined.

    Returns (locked, remaining, removed); removed candidates carry the
    pruning annotation.
    """
    examined: list[PairCandidate] = []
    qualifying: list[tuple[float, PairCandidate]] = []
    for cand in candidates:
        if not (index.triggered(cand.rule_a) and index.triggered(cand.rule_b)):
            examined.append(_with_overlap(cand, index))
            continue
        ratio_a, ratio_b = line_overlap(cand.rule_a, cand.rule_b, index)
        cand = _with_overlap(cand, index, ratio_a=ratio_a, ratio_b=ratio_b)
        if ratio_a >= config.lock_threshold and ratio_b >= config.lock_threshold:
            qualifying.append((min(ratio_a, ratio_b), cand))
        else:
            examined.append(cand)

    qualifying.sort(key=lambda item: (-item[0], item[1].sort_key))
    locked: list[PairCandidate] = []
    removed: list[PairCandidate] = []
    used_a: set[RuleKey] = set()
    used_b: set[RuleKey] = set()
    for min_ratio, cand in qualifying:
        if cand.rule_a in used_a or cand.rule_b in used_b:
            removed.append(
                dataclasses.replace(
                    cand,
                    stage=STAGE_PRUNED,
                    pruned_stage="b",
                    pruned_reason=(
                        f"conflicts with a locked pair (min overlap {min_ratio:.4f})"
                    ),
                )
            )
            continue
        used_a.add(cand.rule_a)
        used_b.add(cand.rule_b)
        locked.append(dataclasses.replace(cand, stage=STAGE_LOCKED_B))

    remaining: list[PairCandidate] = []
    for cand in examined:
        if cand.rule_a in used_a or cand.rule_b in used_b:
            removed.append(
                dataclasses.replace(
                    cand,
                    stage=STAGE_PRUNED,
                    pruned_stage="b",
                    pruned_reason="mentions a rule of a locked pair",
                )
            )
        else:
            remaining.append(cand)
    key = lambda c: c.sort_key
    return sorted(locked, key=key), sorted(remaining, key=key), sorted(removed, key=key)


def stage_c_trigger_filter(
    candidates: Sequence[PairCandidate],
    index: WarningIndex,
    config: MappingConfig,
) -> tuple[list[PairCandidate], list[PairCandidate]]:
    """Prune pairs whose trigger volumes are too far apart.

    Ratio mode prunes when max(a, b) / max(1, min(a, b)) exceeds the limit;
    a pair of untriggered rules has ratio 0 and always passes. Absolute mode
    prunes on |a - b| instead.
    """
    kept: list[PairCandidate] = []
    pruned: list[PairCandidate] = []
    for cand in candidates:
        count_a = index.count(cand.rule_a)
        count_b = index.count(cand.rule_b)
        cand = _with_overlap(cand, index)
        if config.trigger_mode == "ratio":
            measured = max(count_a, count_b) / max(1, min(count_a, count_b))
        else:
            measured = abs(count_a - count_b)
        if measured > config.trigger_ratio_max:
            pruned.append(
                dataclasses.replace(
                    cand,
                    stage=STAGE_PRUNED,
                    pruned_stage="c",
                    pruned_reason=(
                        f"trigger {config.trigger_mode} {measured:.4f} exceeds "
                        f"{config.trigger_ratio_max}"
                    ),
                )
            )
        else:
            kept.append(dataclasses.replace(cand, stage=STAGE_AFTER_C))
    key = lambda c: c.sort_key
    return sorted(kept, key=key), sorted(pruned, key=key)


def stage_d_file_overlap(
    candidates: Sequence[PairCandidate],
    index: WarningIndex,
    config: MappingConfig,
) -> tuple[list[PairCandidate], list[PairCandidate]]:
    """Prune pairs warning in nearly disjoint file sets.

    Pairs with an untriggered side pass through unexamined.
    """
    kept: list[PairCandidate] = []
    pruned: list[PairCandidate] = []
    for cand in candidates:
        if not (index.triggered(cand.rule_a) and index.triggered(cand.rule_b)):
            kept.append(dataclasses.replace(cand, stage=STAGE_AFTER_D))
            continue
        jaccard = file_overlap(cand.rule_a, cand.rule_b, index)
        cand = _with_overlap(cand, index, file_jaccard=jaccard)
        if jaccard < config.file_overlap_min:
            pruned.append(
                dataclasses.replace(
                    cand,
                    stage=STAGE_PRUNED,
                    pruned_stage="d",
                    pruned_reason=(
                        f"file overlap {jaccard:.4f} below {config.file_overlap_min}"
                    ),
                )
            )
        else:
            kept.append(dataclasses.replace(cand, stage=STAGE_AFTER_D))
    key = lambda c: c.sort_key
    return sorted(kept, key=key), sorted(pruned, key=key)


def run_pipeline(
    catalog_a: RuleCatalog,
    catalog_b: RuleCatalog,
    index: WarningIndex,
    config: MappingConfig | None = None,
    model: EmbeddingModel | None = None,
    workers: int = 1,
) -> tuple[list[PairCandidate], MappingReport]:
    """Run filters a through d and return (survivors, funnel report).

    Survivors are the locked pairs plus the stage-d output, sorted by rule
    keys; they await human verdicts. The report counts candidates alive
    after each stage, locked pairs included.
    """
    config = config or MappingConfig()
    scores = score_all_pairs(catalog_a, catalog_b, model, config, workers=workers)
    after_a = stage_a_mutual_top_n(catalog_a, catalog_b, scores, config)
    locked, remaining, _removed = stage_b_lock_one_to_one(after_a, index, config)
    after_c, _pruned_c = stage_c_trigger_filter(remaining, index, config)
    after_d, _pruned_d = stage_d_file_overlap(after_c, index, config)
    survivors = sorted(locked + after_d, key=lambda c: c.sort_key)
    report = MappingReport(
        total_candidates=len(catalog_a) * len(catalog_b),
        after_a=len(after_a),
        after_b=len(locked) + len(remaining),
        after_c=len(locked) + len(after_c),
        after_d=len(locked) + len(after_d),
        locked=len(locked),
        confirmed=0,
    )
    return survivors, report


def ground_truth_candidates(
    index: WarningIndex,
    catalog_a: RuleCatalog,
    catalog_b: RuleCatalog,
    min_trigger: int = 10,
) -> list[PairCandidate]:
    """Pairs recoverable from warning data alone: identical warned-file sets
    and both trigger counts above ``min_trigger``. Used to evaluate recall
    of the similarity-driven funnel; similarity scores play no part here."""
    out: list[PairCandidate] = []
    for ra in catalog_a.rules:
        count_a = index.count(ra.key)
        if count_a <= min_trigger:
            continue
        files_a = index.files(ra.key)
        for rb in catalog_b.rules:
            count_b = index.count(rb.key)
            if count_b <= min_trigger:
                continue
            if files_a == index.files(rb.key):
                out.append(
                    PairCandidate(
                        rule_a=ra.key,
                        rule_b=rb.key,
                        scores=None,
                        stage=STAGE_GROUND_TRUTH,
                        overlap=OverlapInfo(
                            trigger_a=count_a, trigger_b=count_b, file_jaccard=1.0
                        ),
                    )
                )
    return sorted(out, key=lambda c: c.sort_key)


def recall_against(
    survivors: Iterable[PairCandidate],
    confirmed_ground_truth: Iterable[PairCandidate],
) -> float:
    """|survivors ∩ ground truth| / |ground truth|."""
    truth = {cand.key for cand in confirmed_ground_truth}
    if not truth:
        raise ConfigError("ground-truth set is empty; recall is undefined")
    got = {cand.key for cand in survivors}
    return len(truth & got) / len(truth)
