"""Similarity metrics between rules of two catalogs.

Three component scores feed one combined score per cross-tool rule pair:

* term similarity: cosine between TF-IDF vectors of the rules' textual
  content, where IDF is the plain quotient (total rules divided by the
  number of rules containing the term), with no logarithm;
* semantic similarity: cosine between the mean word-embedding vectors of
  the rules' tokens;
* code similarity: Jaccard overlap of the code terms extracted from the
  rules' code examples.

The combined score is ``(term_sim + semt_sim) * (code_sim + 1) / 2``. The
``code_sim + 1`` smoothing keeps a missing code-example overlap from zeroing
the textual evidence; it halves the weight instead.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Mapping, Sequence, TypeVar

import numpy as np

from .catalog import RuleDescriptor, camel_split
from .errors import DimensionError, ValidationError

K = TypeVar("K", bound=Hashable)

TermVector = dict[str, float]

_ALNUM_RE = re.compile(r"[A-Za-z0-9]+")

# Small English stoplist applied to descriptions only when requested.
STOPWORDS_EN = frozenset(
    "a an and are as at be been by for from has have in into is it its of on "
    "or that the these this those to was were will with".split()
)


def tokenize(text: str) -> list[str]:
    """Lowercase terms split at non-alphanumeric and camel-case boundaries.

    Order and duplicates are preserved so term frequencies can be counted
    from the output. No stopwords are removed here.
    """
    out: list[str] = []
    for run in _ALNUM_RE.findall(text):
        out.extend(camel_split(run))
    return out


@dataclass(frozen=True)
class SimilarityScores:
    term_sim: float
    semt_sim: float
    code_sim: float
    description_sim: float

    @classmethod
    def combine(cls, term_sim: float, semt_sim: float, code_sim: float) -> "SimilarityScores":
        return cls(
            term_sim=term_sim,
            semt_sim=semt_sim,
            code_sim=code_sim,
            description_sim=(term_sim + semt_sim) * (code_sim + 1.0) / 2.0,
        )

    def to_obj(self) -> dict:
        return {
            "term_sim": self.term_sim,
            "semt_sim": self.semt_sim,
            "code_sim": self.code_sim,
            "description_sim": self.description_sim,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "SimilarityScores":
        return cls(
            term_sim=obj["term_sim"],
            semt_sim=obj["semt_sim"],
            code_sim=obj["code_sim"],
            description_sim=obj["description_sim"],
        )


@dataclass
class EmbeddingModel:
    """Word vectors of a fixed dimension, keyed by lowercase token."""

    dim: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self):
        if self.dim <= 0:
            raise ValidationError("embedding dimension must be positive")
        converted = {}
        for word, vec in self.vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dim,):
                raise DimensionError(
                    f"vector for {word!r} has shape {arr.shape}, expected ({self.dim},)"
                )
            converted[word] = arr
        self.vectors = converted

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    @classmethod
    def empty(cls, dim: int = 100) -> "EmbeddingModel":
        return cls(dim=dim, vectors={})

    @classmethod
    def load_word2vec(cls, path: str | Path) -> "EmbeddingModel":
        """Read the plain-text word2vec format.

        The first line holds "<vocab_size> <dim>"; every further line holds a
        word followed by exactly dim space-separated floats.
        """
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise ValidationError(
                    f"{path}:1: header must be '<vocab_size> <dim>'"
                )
            try:
                count, dim = int(header[0]), int(header[1])
            except ValueError:
                raise ValidationError(
                    f"{path}:1: header must hold two integers"
                ) from None
            if dim <= 0:
                raise ValidationError(f"{path}:1: dimension must be positive")
            vectors: dict[str, np.ndarray] = {}
            for lineno, line in enumerate(fh, start=2):
                parts = line.split()
                if not parts:
                    continue
                word, values = parts[0], parts[1:]
                if len(values) != dim:
                    raise ValidationError(
                        f"{path}:{lineno}: expected {dim} values for "
                        f"{word!r}, got {len(values)}"
                    )
                try:
                    vectors[word] = np.array([float(v) for v in values])
                except ValueError:
                    raise ValidationError(
                        f"{path}:{lineno}: non-numeric vector component"
                    ) from None
        if len(vectors) != count:
            raise ValidationError(
                f"{path}: header promises {count} vectors, file holds {len(vectors)}"
            )
        return cls(dim=dim, vectors=vectors)

    def save_word2vec(self, path: str | Path) -> None:
        lines = [f"{len(self.vectors)} {self.dim}"]
        for word, vec in self.vectors.items():
            lines.append(word + " " + " ".join(repr(float(v)) for v in vec))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_tf_idf(
    corpus: Mapping[K, str],
    *,
    idf_log: bool = False,
    stopwords: frozenset[str] | None = None,
) -> dict[K, TermVector]:
    """TF-IDF weights per document over the corpus.

    TF is the raw occurrence count of the term in the document. IDF is
    ``total_docs / docs_containing_term``; with ``idf_log`` the natural log
    of that quotient is used instead (terms present in every document then
    drop out). Zero weights are never stored.
    """
    if not corpus:
        raise ValidationError("TF-IDF corpus must be nonempty")
    docs: dict[K, list[str]] = {}
    for key, text in corpus.items():
        tokens = tokenize(text)
        if stopwords:
            tokens = [t for t in tokens if t not in stopwords]
        docs[key] = tokens
    total = len(docs)
    df: Counter[str] = Counter()
    for tokens in docs.values():
        df.update(set(tokens))
    vectors: dict[K, TermVector] = {}
    for key, tokens in docs.items():
        weights: TermVector = {}
        for term, tf in Counter(tokens).items():
            idf = total / df[term]
            if idf_log:
                idf = math.log(idf)
            weight = tf * idf
            if weight > 0.0:
                weights[term] = weight
        vectors[key] = weights
    return vectors


def _sparse_cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    if not a or not b:
        return 0.0
    # Sorted common terms plus exact summation keep the result identical
    # regardless of argument order.
    common = sorted(set(a) & set(b))
    if not common:
        return 0.0
    dot = math.fsum(a[t] * b[t] for t in common)
    norm_a = math.sqrt(math.fsum(v * v for v in a.values()))
    norm_b = math.sqrt(math.fsum(v * v for v in b.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (norm_a * norm_b)


def _dense_cosine(a: np.ndarray, b: np.ndarray) -> float:
    if a.ndim != 1 or b.ndim != 1:
        raise DimensionError("dense vectors must be one-dimensional")
    if a.shape != b.shape:
        raise DimensionError(
            f"vector dimensions differ: {a.shape[0]} vs {b.shape[0]}"
        )
    norm_a = math.sqrt(float(np.dot(a, a)))
    norm_b = math.sqrt(float(np.dot(b, b)))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float(np.dot(a, b)) / (norm_a * norm_b)


def cosine(a, b) -> float:
    """Cosine similarity clamped into [0, 1].

    Accepts two sparse term vectors (mappings) or two dense vectors of equal
    dimension. A zero-norm argument yields 0; negative raw values (possible
    with embeddings) clamp to 0.
    """
    sparse_a = isinstance(a, Mapping)
    sparse_b = isinstance(b, Mapping)
    if sparse_a != sparse_b:
        raise DimensionError("cannot compare a sparse vector with a dense vector")
    if sparse_a:
        value = _sparse_cosine(a, b)
    else:
        value = _dense_cosine(
            np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
        )
    return min(1.0, max(0.0, value))


def embed_rule(text: str, model: EmbeddingModel) -> np.ndarray:
    """Mean of the embedding vectors of the in-vocabulary tokens of text.

    Out-of-vocabulary tokens are skipped; duplicates count once per
    occurrence. When no token is in vocabulary the zero vector comes back,
    which makes any cosine against it 0.
    """
    found = [model.vectors[t] for t in tokenize(text) if t in model.vectors]
    if not found:
        return np.zeros(model.dim, dtype=np.float64)
    return np.add.reduce(found) / len(found)


def code_similarity(a: RuleDescriptor, b: RuleDescriptor) -> float:
    """Jaccard overlap of code terms; 0 when both rules lack examples."""
    union = a.code_terms | b.code_terms
    if not union:
        return 0.0
    return len(a.code_terms & b.code_terms) / len(union)


def description_similarity(
    a: RuleDescriptor,
    b: RuleDescriptor,
    model: EmbeddingModel,
    tfidf: Mapping,
) -> SimilarityScores:
    """All four scores for one rule pair.

    ``tfidf`` must be keyed by rule key over the joint corpus of both
    catalogs; a missing rule raises KeyError.
    """
    for rule in (a, b):
        if rule.key not in tfidf:
            raise KeyError(f"rule {rule.key} missing from the TF-IDF corpus")
    term = cosine(tfidf[a.key], tfidf[b.key])
    semt = cosine(embed_rule(a.text, model), embed_rule(b.text, model))
    code = code_similarity(a, b)
    return SimilarityScores.combine(term, semt, code)
