"""Training-pair construction from retrieval artifacts.

The inputs are plain files produced by the retrieval pipeline:

* a queries file (JSONL, one object per line with at least ``id`` and
  ``original_text``; ``reformulated_text`` is optional),
* a corpus file (JSONL with ``id`` and ``text``),
* a qrels file (TSV, ``query_id<TAB>article_id``),
* a ranking export (TSV, ``query_id<TAB>article_id<TAB>rank`` with rank
  starting at 1 within each query).

Positives are every (query, gold article) pair from the qrels, whether or
not the article made the exported candidate list.  Negatives are the
exported candidates that are not gold for that query.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class PairBuildError(ValueError):
    """Raised when the input files are malformed or inconsistent."""


@dataclass(frozen=True)
class TrainingPair:
    """One labelled example for the cross-encoder.

    ``label`` is 1 for a relevant pair and 0 otherwise.
    """

    query_id: str
    article_id: str
    query_text: str
    article_text: str
    label: int


def _read_jsonl(path: Path, required: tuple[str, ...]) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PairBuildError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise PairBuildError(f"{path}:{lineno}: expected an object")
            for field in required:
                if field not in obj:
                    raise PairBuildError(f"{path}:{lineno}: missing field {field!r}")
            records.append(obj)
    return records


def load_queries(path: str | Path) -> dict[str, dict]:
    """Load the queries file, keyed by query id."""
    out: dict[str, dict] = {}
    for obj in _read_jsonl(Path(path), ("id", "original_text")):
        qid = str(obj["id"])
        if qid in out:
            raise PairBuildError(f"duplicate query id {qid!r} in {path}")
        out[qid] = obj
    return out


def load_articles(path: str | Path) -> dict[str, str]:
    """Load the article corpus, keyed by article id."""
    out: dict[str, str] = {}
    for obj in _read_jsonl(Path(path), ("id", "text")):
        aid = str(obj["id"])
        if aid in out:
            raise PairBuildError(f"duplicate article id {aid!r} in {path}")
        out[aid] = str(obj["text"])
    return out


def load_qrels(path: str | Path) -> dict[str, set[str]]:
    """Load gold labels as a query-id -> set of article ids mapping."""
    gold: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise PairBuildError(
                    f"{path}:{lineno}: expected 2 tab-separated fields, got {len(fields)}"
                )
            gold.setdefault(fields[0], set()).add(fields[1])
    return gold


def load_rankings(path: str | Path) -> dict[str, list[str]]:
    """Load the ranking export as ordered candidate lists per query."""
    rows: dict[str, list[tuple[int, str]]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise PairBuildError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
                )
            qid, aid, rank_text = fields
            try:
                rank = int(rank_text)
            except ValueError as exc:
                raise PairBuildError(f"{path}:{lineno}: bad rank {rank_text!r}") from exc
            if rank < 1:
                raise PairBuildError(f"{path}:{lineno}: rank must be >= 1, got {rank}")
            rows.setdefault(qid, []).append((rank, aid))
    rankings: dict[str, list[str]] = {}
    for qid, pairs in rows.items():
        pairs.sort()
        seen: set[str] = set()
        ordered = []
        for _, aid in pairs:
            if aid in seen:
                raise PairBuildError(f"duplicate candidate {aid!r} for query {qid!r} in {path}")
            seen.add(aid)
            ordered.append(aid)
        rankings[qid] = ordered
    return rankings


def build_training_pairs(
    queries: dict[str, dict],
    articles: dict[str, str],
    gold: dict[str, set[str]],
    rankings: dict[str, list[str]],
    text_field: str = "original_text",
    top_n: int = 30,
) -> list[TrainingPair]:
    """Assemble labelled pairs for every query that has gold labels.

    ``text_field`` selects which query text is paired with the articles;
    the reformulation-based reranker passes ``"reformulated_text"``.
    Every gold article becomes a positive even when it falls outside the
    top ``top_n`` candidates; candidates that are not gold become
    negatives.  Pairs are emitted in a stable order: queries sorted by id,
    positives (sorted by article id) before negatives (candidate order).
    """
    if top_n < 1:
        raise PairBuildError(f"top_n must be >= 1, got {top_n}")
    pairs: list[TrainingPair] = []
    for qid in sorted(gold):
        if qid not in queries:
            raise PairBuildError(f"query {qid!r} has gold labels but no query record")
        if qid not in rankings:
            raise PairBuildError(f"query {qid!r} is missing from the ranking export")
        record = queries[qid]
        query_text = str(record.get(text_field, "") or "")
        if not query_text:
            raise PairBuildError(f"query {qid!r} has no text in field {text_field!r}")
        gold_ids = gold[qid]
        candidates = rankings[qid][:top_n]
        for aid in sorted(gold_ids):
            if aid not in articles:
                raise PairBuildError(f"gold article {aid!r} for query {qid!r} is not in the corpus")
            pairs.append(TrainingPair(qid, aid, query_text, articles[aid], 1))
        for aid in candidates:
            if aid in gold_ids:
                continue
            if aid not in articles:
                raise PairBuildError(f"candidate {aid!r} for query {qid!r} is not in the corpus")
            pairs.append(TrainingPair(qid, aid, query_text, articles[aid], 0))
    return pairs


def build_pairs_from_files(
    queries_path: str | Path,
    corpus_path: str | Path,
    qrels_path: str | Path,
    rankings_path: str | Path,
    text_field: str = "original_text",
    top_n: int = 30,
) -> list[TrainingPair]:
    """File-path convenience wrapper around :func:`build_training_pairs`."""
    return build_training_pairs(
        load_queries(queries_path),
        load_articles(corpus_path),
        load_qrels(qrels_path),
        load_rankings(rankings_path),
        text_field=text_field,
        top_n=top_n,
    )
