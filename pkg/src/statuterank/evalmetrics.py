"""Retrieval evaluation: per-query precision / recall / F2, macro averages,
and recall@k tables for the expansion ablations.

F2 = 5PR / (4P + R), the recall-weighted F-measure; 0 when P = R = 0.
Macro F2 is the unweighted mean of per-query F2 (not F2 of the macro P/R).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .corpus import GoldLabels


@dataclass
class EvalReport:
    per_query: dict[str, tuple[float, float, float]]  # id -> (P, R, F2)
    macro_precision: float
    macro_recall: float
    macro_f2: float
    counts: int


def prf2(predicted: set[str], gold: set[str]) -> tuple[float, float, float]:
    if not gold:
        raise ValueError("gold set must be non-empty")
    hits = len(predicted & gold)
    precision = hits / len(predicted) if predicted else 0.0
    recall = hits / len(gold)
    if precision == 0.0 and recall == 0.0:
        return 0.0, 0.0, 0.0
    f2 = 5 * precision * recall / (4 * precision + recall)
    return precision, recall, f2


def macro_average(per_query: dict[str, tuple[float, float, float]]) -> EvalReport:
    if not per_query:
        raise ValueError("macro average needs at least one query")
    n = len(per_query)
    return EvalReport(
        per_query=dict(per_query),
        macro_precision=sum(v[0] for v in per_query.values()) / n,
        macro_recall=sum(v[1] for v in per_query.values()) / n,
        macro_f2=sum(v[2] for v in per_query.values()) / n,
        counts=n,
    )


def evaluate_selection(
    selected: dict[str, set[str]], gold: GoldLabels
) -> EvalReport:
    """PRF2 per query for a selection run; macro over all gold queries."""
    per_query = {}
    for q_id in sorted(gold):
        if q_id not in selected:
            raise ValueError(f"query {q_id!r} missing from the selection run")
        per_query[q_id] = prf2(selected[q_id], gold[q_id])
    return macro_average(per_query)


def recall_at_k(
    rankings: dict[str, list[str]], gold: GoldLabels, k: int
) -> tuple[float, float]:
    """(macro, micro) recall of gold articles within the top-k of each ranking."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not gold:
        raise ValueError("gold labels are empty")
    per_query = []
    total_hits = 0
    total_gold = 0
    for q_id in sorted(gold):
        if q_id not in rankings:
            raise ValueError(f"query {q_id!r} missing from rankings")
        top = set(rankings[q_id][:k])
        hits = len(top & gold[q_id])
        per_query.append(hits / len(gold[q_id]))
        total_hits += hits
        total_gold += len(gold[q_id])
    macro = sum(per_query) / len(per_query)
    micro = total_hits / total_gold
    return macro, micro


def report_to_dict(report: EvalReport) -> dict:
    return {
        "macro_f2": report.macro_f2,
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
        "counts": report.counts,
        "per_query": {
            q: {"precision": p, "recall": r, "f2": f2}
            for q, (p, r, f2) in sorted(report.per_query.items())
        },
    }


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def format_table(reports: dict[str, EvalReport]) -> str:
    """Aligned plain-text table, one row per system, columns F2 / P / R."""
    name_w = max([len("System"), *(len(n) for n in reports)])
    lines = [f"{'System':<{name_w}}  {'F2':>8}  {'P':>8}  {'R':>8}"]
    for name, rep in reports.items():
        lines.append(
            f"{name:<{name_w}}  {rep.macro_f2:>8.4f}  "
            f"{rep.macro_precision:>8.4f}  {rep.macro_recall:>8.4f}"
        )
    return "\n".join(lines) + "\n"
