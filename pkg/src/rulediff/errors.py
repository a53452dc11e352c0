"""Error types shared across the harness.

Every error carries a short machine-readable ``code`` so the CLI and the
review API can emit structured failures without matching on messages.
"""
from __future__ import annotations


class RuleDiffError(Exception):
    """Base class for all harness errors."""

    code = "error"

    def __init__(self, message: str, *, fields: list[str] | None = None):
        super().__init__(message)
        self.fields = list(fields or [])


class CatalogError(RuleDiffError):
    code = "catalog"


class WarningFormatError(RuleDiffError):
    code = "warning_format"


class ValidationError(RuleDiffError):
    code = "validation"


class UntriggeredRuleError(RuleDiffError):
    code = "untriggered_rule"


class DimensionError(RuleDiffError):
    code = "dimension"


class GranularityError(RuleDiffError):
    code = "granularity"


class UnresolvedLocationError(RuleDiffError):
    code = "unresolved_location"


class SubjectNotFoundError(RuleDiffError):
    code = "not_found"


class ConfigError(RuleDiffError):
    code = "config"


class ReproducibilityError(RuleDiffError):
    code = "reproducibility"


class UsageError(RuleDiffError):
    code = "usage"
