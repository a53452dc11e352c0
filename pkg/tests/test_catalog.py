from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rulediff.catalog import (
    KEYWORD_STOPLIST,
    CodeExample,
    RuleCatalog,
    camel_split,
    catalog_from_obj,
    catalog_to_obj,
    extract_code_terms,
    load_catalog,
    save_catalog,
)
from rulediff.errors import CatalogError

from .conftest import make_rule


@pytest.mark.parametrize(
    "token,expected",
    [
        ("XMLParser", ["xml", "parser"]),
        ("utf8Decoder", ["utf8", "decoder"]),
        ("S1234", ["s1234"]),
        ("INT64", ["int64"]),
        ("getValue", ["get", "value"]),
        ("snake_case_name", ["snake", "case", "name"]),
        ("simple", ["simple"]),
        ("HTTPSConnection", ["https", "connection"]),
        ("parseHTTPResponse", ["parse", "http", "response"]),
    ],
)
def test_camel_split_cases(token, expected):
    assert camel_split(token) == expected


@given(
    st.text(
        alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789",
        max_size=30,
    )
)
def test_camel_split_is_lowercase_and_loses_no_letters(token):
    parts = camel_split(token)
    assert all(p == p.lower() for p in parts)
    assert "".join(parts) == token.replace("_", "").lower()


def test_code_terms_drop_java_keywords():
    example = CodeExample(
        kind="noncompliant",
        source_text="public class FooBar { if (x == null) return new int[0]; }",
    )
    terms = extract_code_terms([example])
    assert "foo" in terms and "bar" in terms and "x" in terms
    assert terms.isdisjoint(KEYWORD_STOPLIST)
    # "null", "return" etc. never make it through, even camel-split
    assert "null" not in terms and "return" not in terms


def test_code_terms_empty_without_examples():
    assert extract_code_terms([]) == frozenset()


def test_rule_requires_some_text():
    with pytest.raises(CatalogError):
        make_rule("alpha", "A1", title="", description="")


def test_rule_text_joins_title_and_description():
    rule = make_rule("alpha", "A1", "Null check", "Avoid null derefs")
    assert rule.text == "Null check Avoid null derefs"
    title_only = make_rule("alpha", "A2", "Just a title")
    assert title_only.text == "Just a title"


def test_catalog_rejects_duplicate_rule_ids():
    with pytest.raises(CatalogError, match="duplicate"):
        RuleCatalog(
            tool_id="alpha",
            rules=[make_rule("alpha", "A1", "t"), make_rule("alpha", "A1", "t")],
        )


def test_catalog_rejects_foreign_rule():
    with pytest.raises(CatalogError):
        RuleCatalog(tool_id="alpha", rules=[make_rule("beta", "B1", "t")])


def test_unknown_rule_lookup_names_the_rule(two_catalogs):
    a, _ = two_catalogs
    with pytest.raises(CatalogError, match="A9"):
        a.rule("A9")


def test_from_obj_validation_messages():
    with pytest.raises(CatalogError, match="tool"):
        catalog_from_obj({"rules": []})
    with pytest.raises(CatalogError, match=r"rules\[0\]"):
        catalog_from_obj({"tool": "alpha", "rules": ["nope"]})
    with pytest.raises(CatalogError, match="rule_id"):
        catalog_from_obj({"tool": "alpha", "rules": [{"title": "x"}]})


def test_round_trip_preserves_order_and_content(tmp_path, two_catalogs):
    a, _ = two_catalogs
    path = tmp_path / "catalog.json"
    save_catalog(a, path)
    loaded = load_catalog(path)
    assert catalog_to_obj(loaded) == catalog_to_obj(a)
    # byte-identical when saved again
    second = tmp_path / "again.json"
    save_catalog(loaded, second)
    assert path.read_bytes() == second.read_bytes()


def test_load_catalog_reports_json_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"tool": "alpha",\n  "rules": [}', encoding="utf-8")
    with pytest.raises(CatalogError, match="line 2"):
        load_catalog(path)


def test_code_example_kind_is_validated():
    with pytest.raises(CatalogError):
        CodeExample(kind="weird", source_text="class A {}")


def test_catalog_json_shape(tmp_path, two_catalogs):
    a, _ = two_catalogs
    path = tmp_path / "catalog.json"
    save_catalog(a, path)
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["tool"] == "alpha"
    assert [r["rule_id"] for r in data["rules"]] == ["A1", "A2", "A3"]
