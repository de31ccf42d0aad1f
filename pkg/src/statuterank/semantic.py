"""Score tables for the semantic rankers (and transport of BM25/fused scores).

The primary pipeline never runs a neural model. Scores either come from
precomputed TSV files or from a remote scoring service speaking
``POST /score  {"pairs": [{"query": ..., "article": ...}]} -> {"scores": [...]}``
where each score is a positive-class probability in [0, 1].
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import requests


@dataclass
class ScoreTable:
    scorer_name: str
    entries: dict[tuple[str, str], float] = field(default_factory=dict)

    def get(self, query_id: str, article_id: str) -> float:
        """Stored score, or 0.0 for unscored pairs (degraded mode)."""
        return self.entries.get((query_id, article_id), 0.0)

    def query_ids(self) -> list[str]:
        return sorted({q for q, _ in self.entries})


def get_score(table: ScoreTable, query_id: str, article_id: str) -> float:
    return table.get(query_id, article_id)


def load_scores(path, scorer_name: str) -> ScoreTable:
    entries: dict[tuple[str, str], float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(
                    f"{path}:{lineno}: expected 'query_id<TAB>article_id<TAB>score'"
                )
            q_id, a_id, raw = parts
            try:
                score = float(raw)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: unparseable score {raw!r}") from exc
            if not math.isfinite(score):
                raise ValueError(f"{path}:{lineno}: non-finite score {raw!r}")
            key = (q_id, a_id)
            if key in entries:
                raise ValueError(f"{path}:{lineno}: duplicate pair {key!r}")
            entries[key] = score
    return ScoreTable(scorer_name=scorer_name, entries=entries)


def save_scores(table: ScoreTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (q_id, a_id) in sorted(table.entries):
            fh.write(f"{q_id}\t{a_id}\t{table.entries[(q_id, a_id)]!r}\n")


@dataclass(frozen=True)
class ScoringEndpointConfig:
    url: str  # full URL of the /score endpoint
    batch_size: int = 32
    timeout: float = 60.0
    max_retries: int = 3
    backoff: float = 1.0


def request_scores(
    pairs: list[tuple[str, str, str, str]],
    endpoint: ScoringEndpointConfig,
    scorer_name: str = "remote",
    session=None,
    sleep=time.sleep,
) -> ScoreTable:
    """Score (query_text, article_text, query_id, article_id) tuples remotely.

    Requests are batched (default 32 pairs per call); the merged table is
    independent of batch size.
    """
    if not pairs:
        raise ValueError("pairs must be non-empty")
    session = session or requests.Session()
    entries: dict[tuple[str, str], float] = {}
    for start in range(0, len(pairs), endpoint.batch_size):
        batch = pairs[start : start + endpoint.batch_size]
        body = {"pairs": [{"query": q, "article": a} for q, a, _, _ in batch]}
        scores = _post_batch(session, endpoint, body, sleep)
        if len(scores) != len(batch):
            raise ValueError(
                f"scoring service returned {len(scores)} scores for {len(batch)} pairs"
            )
        for (_, _, q_id, a_id), score in zip(batch, scores):
            entries[(q_id, a_id)] = float(score)
    return ScoreTable(scorer_name=scorer_name, entries=entries)


def _post_batch(session, endpoint: ScoringEndpointConfig, body, sleep) -> list[float]:
    last_exc = None
    for attempt in range(endpoint.max_retries):
        try:
            resp = session.post(endpoint.url, json=body, timeout=endpoint.timeout)
            resp.raise_for_status()
            return resp.json()["scores"]
        except (requests.RequestException, KeyError, ValueError) as exc:
            last_exc = exc
            if attempt + 1 < endpoint.max_retries:
                sleep(endpoint.backoff * (2**attempt))
    raise RuntimeError(f"scoring request failed after retries: {last_exc}")
