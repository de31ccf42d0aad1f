"""Inverted index and Okapi BM25 scoring.

IDF is the non-negative variant ln(1 + (m - df + 0.5) / (df + 0.5)); the
classical Robertson IDF can go negative for very common terms, which would
corrupt score fusion downstream. Query tokens absent from the corpus
contribute 0. Repeated query tokens contribute once per occurrence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .corpus import Article
from .tokenization import tokenize

INDEX_FORMAT_VERSION = 1


@dataclass(frozen=True)
class BM25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass
class InvertedIndex:
    postings: dict[str, dict[str, int]]  # term -> {article_id: term frequency}
    doc_lengths: dict[str, int]
    avg_doc_length: float = field(init=False)
    doc_count: int = field(init=False)

    def __post_init__(self):
        self.doc_count = len(self.doc_lengths)
        if self.doc_count == 0:
            raise ValueError("index requires at least one document")
        self.avg_doc_length = sum(self.doc_lengths.values()) / self.doc_count


def build_index(articles: list[Article], scheme: str = "unicode-basic") -> InvertedIndex:
    if not articles:
        raise ValueError("cannot build an index from an empty corpus")
    postings: dict[str, dict[str, int]] = {}
    doc_lengths: dict[str, int] = {}
    for art in articles:
        tokens = list(art.tokens) if art.tokens is not None else tokenize(art.text, scheme)
        doc_lengths[art.id] = len(tokens)
        for tok in tokens:
            postings.setdefault(tok, {})
            postings[tok][art.id] = postings[tok].get(art.id, 0) + 1
    return InvertedIndex(postings=postings, doc_lengths=doc_lengths)


def _idf(index: InvertedIndex, term: str) -> float:
    df = len(index.postings.get(term, ()))
    if df == 0:
        return 0.0
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def bm25_score(
    index: InvertedIndex,
    params: BM25Params,
    query_tokens: list[str],
    article_id: str,
) -> float:
    if article_id not in index.doc_lengths:
        raise KeyError(f"unknown article id {article_id!r}")
    if index.avg_doc_length == 0.0:  # every document empty: nothing can match
        return 0.0
    dl = index.doc_lengths[article_id]
    norm = params.k1 * (1.0 - params.b + params.b * dl / index.avg_doc_length)
    score = 0.0
    for tok in query_tokens:
        per_doc = index.postings.get(tok)
        if not per_doc:
            continue
        tf = per_doc.get(article_id, 0)
        if tf == 0:
            continue
        score += _idf(index, tok) * tf * (params.k1 + 1.0) / (tf + norm)
    return score


def top_k(
    index: InvertedIndex,
    params: BM25Params,
    query_tokens: list[str],
    k: int,
) -> list[tuple[str, float]]:
    """Top-k articles by BM25, descending score, ties ascending by article id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scores = {doc_id: 0.0 for doc_id in index.doc_lengths}
    for tok in query_tokens:
        per_doc = index.postings.get(tok)
        if not per_doc:
            continue
        idf = _idf(index, tok)
        for doc_id, tf in per_doc.items():
            dl = index.doc_lengths[doc_id]
            norm = params.k1 * (1.0 - params.b + params.b * dl / index.avg_doc_length)
            scores[doc_id] += idf * tf * (params.k1 + 1.0) / (tf + norm)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[: min(k, index.doc_count)]


def save_index(index: InvertedIndex, path) -> None:
    payload = {
        "version": INDEX_FORMAT_VERSION,
        "postings": index.postings,
        "doc_lengths": index.doc_lengths,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def load_index(path) -> InvertedIndex:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("version")
    if version != INDEX_FORMAT_VERSION:
        raise ValueError(f"unsupported index format version {version!r}")
    return InvertedIndex(
        postings=payload["postings"], doc_lengths=payload["doc_lengths"]
    )
