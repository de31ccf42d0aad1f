"""Loading and validation of the statute corpus, query sets, and gold labels.

File formats:
  corpus  -- one JSON object per line: {"id": ..., "text": ..., "tokens": [...]?}
  queries -- one JSON object per line: {"id": ..., "original_text": ...,
             "terms": [...]?, "reformulated_text": ...?, "tokens": [...]?}
  qrels   -- TSV, ``query_id<TAB>article_id``, no header
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class DatasetError(ValueError):
    """Malformed or inconsistent corpus / query / qrels data."""


@dataclass(frozen=True)
class Article:
    id: str
    text: str
    tokens: tuple[str, ...] | None = None  # optional pre-tokenized form


@dataclass(frozen=True)
class QueryRecord:
    id: str
    original_text: str
    terms: tuple[str, ...] = ()
    term_expanded_text: str = ""
    reformulated_text: str = ""
    tokens: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.term_expanded_text:
            object.__setattr__(
                self, "term_expanded_text", expand_text(self.original_text, self.terms)
            )


def expand_text(original_text: str, terms) -> str:
    """Concatenate a query with its extracted terms, space-joined, duplicates kept."""
    parts = [original_text, *terms]
    return " ".join(parts)


GoldLabels = dict[str, set[str]]


def _iter_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            if not isinstance(obj, dict):
                raise DatasetError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def load_corpus(path) -> list[Article]:
    articles = []
    seen = set()
    for lineno, obj in _iter_jsonl(path):
        art_id = obj.get("id")
        text = obj.get("text")
        if not art_id or not isinstance(art_id, str):
            raise DatasetError(f"{path}:{lineno}: missing or empty 'id'")
        if not text or not isinstance(text, str):
            raise DatasetError(f"{path}:{lineno}: missing or empty 'text'")
        if art_id in seen:
            raise DatasetError(f"{path}:{lineno}: duplicate article id {art_id!r}")
        seen.add(art_id)
        tokens = obj.get("tokens")
        articles.append(
            Article(id=art_id, text=text, tokens=tuple(tokens) if tokens else None)
        )
    return articles


def load_queries(path) -> list[QueryRecord]:
    queries = []
    seen = set()
    for lineno, obj in _iter_jsonl(path):
        q_id = obj.get("id")
        original = obj.get("original_text")
        if not q_id or not isinstance(q_id, str):
            raise DatasetError(f"{path}:{lineno}: missing or empty 'id'")
        if not original or not isinstance(original, str):
            raise DatasetError(f"{path}:{lineno}: missing or empty 'original_text'")
        if q_id in seen:
            raise DatasetError(f"{path}:{lineno}: duplicate query id {q_id!r}")
        seen.add(q_id)
        terms = tuple(obj.get("terms") or ())
        if any(not isinstance(t, str) or not t for t in terms):
            raise DatasetError(f"{path}:{lineno}: 'terms' must be non-empty strings")
        tokens = obj.get("tokens")
        queries.append(
            QueryRecord(
                id=q_id,
                original_text=original,
                terms=terms,
                reformulated_text=obj.get("reformulated_text") or "",
                tokens=tuple(tokens) if tokens else None,
            )
        )
    return queries


def load_qrels(path) -> GoldLabels:
    gold: GoldLabels = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise DatasetError(
                    f"{path}:{lineno}: expected 'query_id<TAB>article_id'"
                )
            gold.setdefault(parts[0], set()).add(parts[1])
    return gold


def save_corpus(articles: list[Article], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for art in articles:
            obj = {"id": art.id, "text": art.text}
            if art.tokens is not None:
                obj["tokens"] = list(art.tokens)
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def save_queries(queries: list[QueryRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            obj = {"id": q.id, "original_text": q.original_text}
            if q.terms:
                obj["terms"] = list(q.terms)
            if q.reformulated_text:
                obj["reformulated_text"] = q.reformulated_text
            if q.tokens is not None:
                obj["tokens"] = list(q.tokens)
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def validate_dataset(
    articles: list[Article], queries: list[QueryRecord], gold: GoldLabels
) -> None:
    """Check gold labels reference known queries/articles and are non-empty."""
    article_ids = {a.id for a in articles}
    query_ids = {q.id for q in queries}
    problems = []
    for q_id, arts in gold.items():
        if q_id not in query_ids:
            problems.append(f"unknown query id {q_id!r}")
        if not arts:
            problems.append(f"empty gold set for query {q_id!r}")
        for a_id in sorted(arts):
            if a_id not in article_ids:
                problems.append(f"unknown article id {a_id!r} (query {q_id!r})")
    if problems:
        raise DatasetError("qrels validation failed: " + "; ".join(problems))
