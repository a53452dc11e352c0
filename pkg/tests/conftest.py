from __future__ import annotations

import pytest

from rulediff.catalog import CodeExample, RuleCatalog, RuleDescriptor
from rulediff.warnstore import WarningRecord, WarningStore


def make_rule(tool, rule_id, title="", description="", examples=()):
    return RuleDescriptor(
        tool_id=tool,
        rule_id=rule_id,
        title=title,
        description=description,
        code_examples=tuple(
            CodeExample(kind="noncompliant", source_text=src) for src in examples
        ),
    )


def make_record(tool, rule_id, file="F.java", start=1, end=None, project="p", span=None):
    return WarningRecord(
        tool_id=tool,
        rule_id=rule_id,
        project_id=project,
        file_path=file,
        start_line=start,
        end_line=end if end is not None else start,
        method_span=span,
    )


def build_index(records, *catalogs):
    store = WarningStore()
    result = store.ingest_records(records, *catalogs)
    assert not result.rejected, result.rejected
    return store.freeze()


@pytest.fixture
def two_catalogs():
    a = RuleCatalog(
        tool_id="alpha",
        rules=[
            make_rule("alpha", "A1", "Null dereference check", "Dereferencing null causes a crash"),
            make_rule("alpha", "A2", "Unused variable", "A variable is assigned but never read"),
            make_rule("alpha", "A3", "Empty catch block", "Catching an exception and ignoring it"),
        ],
    )
    b = RuleCatalog(
        tool_id="beta",
        rules=[
            make_rule("beta", "B1", "Null pointer dereference", "Dereferencing null crashes the program"),
            make_rule("beta", "B2", "Dead store to variable", "A variable is assigned but never read"),
            make_rule("beta", "B3", "Swallowed exception", "An exception is caught and ignored"),
        ],
    )
    return a, b
