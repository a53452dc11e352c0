"""Rule catalogs and code-term extraction.

A catalog is the rule set of one static bug finder. Each rule carries a
title, a prose description, and optional code examples. Identifiers found
in the examples are camel-split into lowercase terms; those terms drive the
code-similarity component of rule pairing.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import CatalogError

RuleKey = tuple[str, str]

EXAMPLE_KINDS = ("compliant", "noncompliant", "unspecified")

# Language keywords dropped during identifier extraction.
KEYWORD_STOPLIST = frozenset({
    "if", "else", "for", "while", "return", "new", "null", "true", "false",
    "void", "int", "long", "boolean", "class", "public", "private",
    "protected", "static", "final",
})

_IDENTIFIER_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_ACRONYM_RE = re.compile(r"([A-Z]+)([A-Z][a-z])")
_CAMEL_RE = re.compile(r"([a-z0-9])([A-Z])")


def camel_split(token: str) -> list[str]:
    """Split one identifier at underscore and camel-case boundaries.

    A run of capitals breaks before its last capital when a lowercase letter
    follows, so "XMLParser" gives ["xml", "parser"]. Digits stay attached to
    their alphabetic run: "utf8Decoder" gives ["utf8", "decoder"]. Parts come
    back lowercased.
    """
    spaced = _ACRONYM_RE.sub(r"\1 \2", token)
    spaced = _CAMEL_RE.sub(r"\1 \2", spaced)
    return [part for part in spaced.replace("_", " ").lower().split() if part]


@dataclass(frozen=True)
class CodeExample:
    kind: str
    source_text: str

    def __post_init__(self):
        if self.kind not in EXAMPLE_KINDS:
            raise CatalogError(
                f"code example kind must be one of {EXAMPLE_KINDS}, got {self.kind!r}"
            )
        if not self.source_text:
            raise CatalogError("code example source must be nonempty")


def extract_code_terms(examples: Iterable[CodeExample]) -> frozenset[str]:
    """Lowercase terms from all identifiers in the examples, keywords removed."""
    terms: set[str] = set()
    for example in examples:
        for token in _IDENTIFIER_RE.findall(example.source_text):
            if token in KEYWORD_STOPLIST:
                continue
            terms.update(camel_split(token))
    return frozenset(terms)


@dataclass(frozen=True)
class RuleDescriptor:
    tool_id: str
    rule_id: str
    title: str
    description: str
    code_examples: tuple[CodeExample, ...] = ()
    code_terms: frozenset[str] = field(init=False)

    def __post_init__(self):
        if not self.tool_id:
            raise CatalogError("rule is missing a tool id")
        if not self.rule_id:
            raise CatalogError(f"tool {self.tool_id}: rule is missing a rule id")
        object.__setattr__(self, "code_examples", tuple(self.code_examples))
        if not self.text:
            raise CatalogError(
                f"rule {self.rule_id}: title and description are both empty"
            )
        object.__setattr__(self, "code_terms", extract_code_terms(self.code_examples))

    @property
    def key(self) -> RuleKey:
        return (self.tool_id, self.rule_id)

    @property
    def text(self) -> str:
        """Textual content used by the term and embedding similarities."""
        return f"{self.title} {self.description}".strip()


@dataclass
class RuleCatalog:
    tool_id: str
    rules: list[RuleDescriptor]
    _by_id: dict[str, RuleDescriptor] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        if not self.tool_id:
            raise CatalogError("catalog is missing a tool id")
        for rule in self.rules:
            if rule.tool_id != self.tool_id:
                raise CatalogError(
                    f"rule {rule.rule_id} belongs to tool {rule.tool_id}, "
                    f"not {self.tool_id}"
                )
            if rule.rule_id in self._by_id:
                raise CatalogError(f"duplicate rule id {rule.rule_id!r}")
            self._by_id[rule.rule_id] = rule

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def rule(self, rule_id: str) -> RuleDescriptor:
        try:
            return self._by_id[rule_id]
        except KeyError:
            raise CatalogError(
                f"tool {self.tool_id} has no rule {rule_id!r}"
            ) from None

    def rule_keys(self) -> list[RuleKey]:
        return [rule.key for rule in self.rules]


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise CatalogError(f"{context}: missing field {key!r}")
    return obj[key]


def catalog_from_obj(data, source: str = "<catalog>") -> RuleCatalog:
    if not isinstance(data, dict):
        raise CatalogError(f"{source}: catalog root must be an object")
    tool = _require(data, "tool", source)
    if not isinstance(tool, str) or not tool:
        raise CatalogError(f"{source}: 'tool' must be a nonempty string")
    raw_rules = _require(data, "rules", source)
    if not isinstance(raw_rules, list):
        raise CatalogError(f"{source}: 'rules' must be a list")
    rules = []
    for i, raw in enumerate(raw_rules):
        context = f"{source}: rules[{i}]"
        if not isinstance(raw, dict):
            raise CatalogError(f"{context}: rule must be an object")
        rule_id = _require(raw, "rule_id", context)
        examples = []
        for j, ex in enumerate(raw.get("code_examples", [])):
            if not isinstance(ex, dict):
                raise CatalogError(f"{context}: code_examples[{j}] must be an object")
            examples.append(
                CodeExample(
                    kind=ex.get("kind", "unspecified"),
                    source_text=_require(ex, "source", f"{context}.code_examples[{j}]"),
                )
            )
        rules.append(
            RuleDescriptor(
                tool_id=tool,
                rule_id=str(rule_id),
                title=raw.get("title", ""),
                description=raw.get("description", ""),
                code_examples=tuple(examples),
            )
        )
    return RuleCatalog(tool_id=tool, rules=rules)


def catalog_to_obj(catalog: RuleCatalog) -> dict:
    return {
        "tool": catalog.tool_id,
        "rules": [
            {
                "rule_id": rule.rule_id,
                "title": rule.title,
                "description": rule.description,
                "code_examples": [
                    {"kind": ex.kind, "source": ex.source_text}
                    for ex in rule.code_examples
                ],
            }
            for rule in catalog.rules
        ],
    }


def load_catalog(path: str | Path) -> RuleCatalog:
    """Read a catalog JSON file; every rule comes back with code_terms set."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CatalogError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return catalog_from_obj(data, source=str(path))


def save_catalog(catalog: RuleCatalog, path: str | Path) -> None:
    """Serialize a catalog; loading the output yields an identical catalog."""
    text = json.dumps(catalog_to_obj(catalog), indent=2, ensure_ascii=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")
