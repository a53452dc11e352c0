"""Differential testing harness for static-analysis rule catalogs.

Pairs semantically equivalent rules across two bug finders, diffs their
warnings on shared code, and manages the human review of the disagreements.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .catalog import CodeExample, RuleCatalog, RuleDescriptor, load_catalog, save_catalog
from .diffing import (
    GranularityMap,
    InconsistencyRecord,
    MethodSpanIndex,
    diff_all,
    diff_pair_line,
    diff_pair_method,
)
from .errors import (
    CatalogError,
    ConfigError,
    DimensionError,
    GranularityError,
    ReproducibilityError,
    RuleDiffError,
    SubjectNotFoundError,
    UnresolvedLocationError,
    UntriggeredRuleError,
    UsageError,
    ValidationError,
    WarningFormatError,
)
from .mapper import (
    MappingConfig,
    MappingReport,
    PairCandidate,
    ground_truth_candidates,
    recall_against,
    run_pipeline,
    score_all_pairs,
)
from .similarity import (
    EmbeddingModel,
    SimilarityScores,
    build_tf_idf,
    code_similarity,
    cosine,
    description_similarity,
    embed_rule,
    tokenize,
)
from .triage import (
    BugFinding,
    TriageStore,
    TriageVerdict,
    cohen_kappa,
    kappa_from_confusion,
    summarize_findings,
)
from .warnstore import (
    MethodSpan,
    WarningIndex,
    WarningRecord,
    WarningStore,
    compute_stats,
    file_overlap,
    line_overlap,
)

__all__ = [
    "__version__",
    "BugFinding",
    "CatalogError",
    "CodeExample",
    "ConfigError",
    "DimensionError",
    "EmbeddingModel",
    "GranularityError",
    "GranularityMap",
    "InconsistencyRecord",
    "MappingConfig",
    "MappingReport",
    "MethodSpan",
    "MethodSpanIndex",
    "PairCandidate",
    "ReproducibilityError",
    "RuleCatalog",
    "RuleDescriptor",
    "RuleDiffError",
    "SimilarityScores",
    "SubjectNotFoundError",
    "TriageStore",
    "TriageVerdict",
    "UnresolvedLocationError",
    "UntriggeredRuleError",
    "UsageError",
    "ValidationError",
    "WarningFormatError",
    "WarningIndex",
    "WarningRecord",
    "WarningStore",
    "build_tf_idf",
    "code_similarity",
    "cohen_kappa",
    "compute_stats",
    "cosine",
    "description_similarity",
    "diff_all",
    "diff_pair_line",
    "diff_pair_method",
    "embed_rule",
    "file_overlap",
    "ground_truth_candidates",
    "kappa_from_confusion",
    "line_overlap",
    "load_catalog",
    "recall_against",
    "run_pipeline",
    "save_catalog",
    "score_all_pairs",
    "summarize_findings",
]
