"""Score fusion: per-query min-max normalization, weighted combination of the
three rankers, threshold-based answer selection, and grid search for the
weights and threshold.

Normalization happens per scorer per query over the candidate pool, before
fusion. A scorer that is constant over the pool normalizes to all zeros
(it carries no ranking information and must not push candidates over the
threshold). Selection uses a strictly-greater-than comparison with a top-1
fallback so the answer set is never empty.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import GoldLabels
from .semantic import ScoreTable

SCORERS = ("origin", "bm25", "reform")


@dataclass(frozen=True)
class EnsembleConfig:
    alpha: float  # weight of the original-query semantic scorer
    beta: float  # weight of BM25 on the term-expanded query
    gamma: float  # weight of the reformulated-query semantic scorer
    threshold: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if abs(self.alpha + self.beta + self.gamma - 1.0) > 1e-9:
            raise ValueError("alpha + beta + gamma must equal 1")


@dataclass(frozen=True)
class GridSpec:
    weight_step: float = 0.05
    threshold_step: float = 0.01


@dataclass
class FusedRanking:
    rankings: dict[str, list[tuple[str, float]]]  # query_id -> sorted candidates
    selected: dict[str, set[str]]  # query_id -> answer set


def minmax_normalize(scores: list[tuple[str, float]]) -> list[tuple[str, float]]:
    if not scores:
        raise ValueError("cannot normalize an empty score list")
    values = [v for _, v in scores]
    lo, hi = min(values), max(values)
    if hi == lo:
        return [(a, 0.0) for a, _ in scores]
    span = hi - lo
    return [(a, (v - lo) / span) for a, v in scores]


def fuse(config: EnsembleConfig, r_ori: float, r_bm25: float, r_reform: float) -> float:
    return config.alpha * r_ori + config.beta * r_bm25 + config.gamma * r_reform


def select_relevant(
    ranking: list[tuple[str, float]], threshold: float
) -> set[str]:
    """Articles scoring strictly above the threshold; top-1 fallback if none do."""
    if not ranking:
        raise ValueError("cannot select from an empty ranking")
    selected = {a for a, v in ranking if v > threshold}
    if not selected:
        selected = {ranking[0][0]}
    return selected


def fuse_rankings(
    config: EnsembleConfig,
    pools: dict[str, list[str]],
    tables: dict[str, ScoreTable],
) -> FusedRanking:
    """Normalize, fuse, rank, and select over each query's candidate pool.

    ``tables`` maps scorer name ("origin", "bm25", "reform") to its table;
    unscored pairs default to 0.0 before normalization.
    """
    rankings: dict[str, list[tuple[str, float]]] = {}
    selected: dict[str, set[str]] = {}
    for q_id, candidates in pools.items():
        normalized = {}
        for name in SCORERS:
            raw = [(a, tables[name].get(q_id, a)) for a in candidates]
            normalized[name] = dict(minmax_normalize(raw))
        fused = [
            (
                a,
                fuse(
                    config,
                    normalized["origin"][a],
                    normalized["bm25"][a],
                    normalized["reform"][a],
                ),
            )
            for a in candidates
        ]
        fused.sort(key=lambda kv: (-kv[1], kv[0]))
        rankings[q_id] = fused
        selected[q_id] = select_relevant(fused, config.threshold)
    return FusedRanking(rankings=rankings, selected=selected)


def simplex_grid(weight_step: float, active=SCORERS) -> list[tuple[float, float, float]]:
    """All (alpha, beta, gamma) on the simplex at the given step, in
    lexicographic order; weights of inactive scorers are forced to zero."""
    n = round(1.0 / weight_step)
    if n < 1 or abs(n * weight_step - 1.0) > 1e-9:
        raise ValueError(f"weight_step must evenly divide 1, got {weight_step}")
    combos = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            k = n - i - j
            combo = (i / n, j / n, k / n)
            ok = all(
                w == 0.0 or name in active
                for w, name in zip(combo, SCORERS)
            )
            if ok:
                combos.append(combo)
    return combos


def threshold_grid(threshold_step: float) -> list[float]:
    thresholds = []
    t, k = 0.0, 0
    while True:
        t = k * threshold_step
        if t >= 1.0:
            break
        thresholds.append(t)
        k += 1
    return thresholds


def grid_search(
    query_ids: list[str],
    gold: GoldLabels,
    pools: dict[str, list[str]],
    tables: dict[str, ScoreTable],
    grid: GridSpec = GridSpec(),
    active=SCORERS,
) -> tuple[EnsembleConfig, float]:
    """Exhaustive search over the weight simplex and threshold grid.

    Returns the config maximizing macro-averaged F2 on the given queries and
    that F2; ties go to the lexicographically smallest (alpha, beta, gamma,
    threshold).
    """
    if not query_ids:
        raise ValueError("grid search needs at least one validation query")
    for q_id in query_ids:
        if q_id not in pools or not pools[q_id]:
            raise ValueError(f"query {q_id!r} has no candidate pool")
        if q_id not in gold or not gold[q_id]:
            raise ValueError(f"query {q_id!r} has no gold labels")

    # Precompute, per query: normalized score matrix (3, n) over candidates
    # sorted ascending by article id (so argmax ties resolve to the smallest
    # id, matching the ranking tie rule), plus the gold membership mask.
    per_query = []
    for q_id in query_ids:
        candidates = sorted(pools[q_id])
        mats = []
        for name in SCORERS:
            norm = minmax_normalize(
                [(a, tables[name].get(q_id, a)) for a in candidates]
            )
            mats.append([v for _, v in norm])
        scores = np.array(mats)  # (3, n)
        gold_mask = np.array([a in gold[q_id] for a in candidates])
        per_query.append((scores, gold_mask, len(gold[q_id])))

    thresholds = np.array(threshold_grid(grid.threshold_step))
    best_combo, best_t_idx, best_f2 = None, None, -1.0
    for combo in simplex_grid(grid.weight_step, active=active):
        w = np.array(combo)
        f2_sum = np.zeros(len(thresholds))
        for scores, gold_mask, n_gold in per_query:
            fused = w @ scores  # (n,)
            sel = fused[:, None] > thresholds[None, :]  # (n, T)
            pred = sel.sum(axis=0)
            tp = (sel & gold_mask[:, None]).sum(axis=0)
            # top-1 fallback where nothing exceeds the threshold
            empty = pred == 0
            if empty.any():
                top = int(np.argmax(fused))
                pred = np.where(empty, 1, pred)
                tp = np.where(empty, int(gold_mask[top]), tp)
            precision = tp / pred
            recall = tp / n_gold
            denom = 4 * precision + recall
            with np.errstate(divide="ignore", invalid="ignore"):
                f2 = np.where(denom > 0, 5 * precision * recall / denom, 0.0)
            f2_sum += f2
        t_idx = int(np.argmax(f2_sum))  # first max: smallest threshold
        f2_here = f2_sum[t_idx] / len(per_query)
        if f2_here > best_f2:
            best_combo, best_t_idx, best_f2 = combo, t_idx, f2_here
    config = EnsembleConfig(
        alpha=best_combo[0],
        beta=best_combo[1],
        gamma=best_combo[2],
        threshold=float(thresholds[best_t_idx]),
    )
    return config, float(best_f2)
