"""Command-line pipeline driver.

Usage:
    statuterank <index|expand|score|tune|evaluate|run-all> --config CONFIG
                [--no-clobber] [--variant {1,2,3}]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import corpus as corpus_mod
from . import ensemble as ensemble_mod
from . import evalmetrics, figures, lexical, semantic
from .config import PipelineConfig, load_config
from .expand import FixtureMissError, LlmClient, LlmTransportError, extract_terms, reformulate
from .tokenization import tokenize

VARIANT_SCORERS = {
    1: ("origin", "bm25"),
    2: ("bm25", "reform"),
    3: ("origin", "bm25", "reform"),
}


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _length_stats(lengths: list[int]) -> dict:
    return {
        "count": len(lengths),
        "min": min(lengths),
        "max": max(lengths),
        "average": round(sum(lengths) / len(lengths), 2),
    }


def _query_tokens(query: corpus_mod.QueryRecord, scheme: str) -> tuple[list[str], list[str]]:
    """(original tokens, term-expanded tokens) for one query."""
    base = list(query.tokens) if query.tokens is not None else tokenize(
        query.original_text, scheme
    )
    expanded = list(base)
    for term in query.terms:
        expanded.extend(tokenize(term, scheme))
    return base, expanded


def cmd_index(cfg: PipelineConfig, no_clobber: bool = False) -> None:
    articles = corpus_mod.load_corpus(cfg.corpus)
    queries = corpus_mod.load_queries(cfg.queries)
    os.makedirs(cfg.workdir, exist_ok=True)
    index = lexical.build_index(articles, cfg.tokenizer)
    if not (no_clobber and os.path.exists(cfg.index_path)):
        lexical.save_index(index, cfg.index_path)
    doc_lengths = list(index.doc_lengths.values())
    query_lengths = [len(_query_tokens(q, cfg.tokenizer)[0]) for q in queries]
    stats = {
        "articles": _length_stats(doc_lengths),
        "queries": _length_stats(query_lengths),
    }
    _write_json(os.path.join(cfg.workdir, "corpus_stats.json"), stats)
    print(f"indexed {index.doc_count} articles -> {cfg.index_path}")
    for side in ("articles", "queries"):
        s = stats[side]
        print(
            f"{side}: count={s['count']} tokens min={s['min']} "
            f"max={s['max']} avg={s['average']}"
        )


def cmd_expand(cfg: PipelineConfig, no_clobber: bool = False) -> int:
    queries = corpus_mod.load_queries(cfg.queries)
    client = LlmClient(cfg.llm, cfg.cache_dir, fixture_only=cfg.fixture_only)
    failures = []
    updated = []
    for q in queries:
        terms = list(q.terms)
        reformulated = q.reformulated_text
        try:
            if not terms:
                terms = extract_terms(q, client)
            if not reformulated:
                reformulated = reformulate(q, client)
        except (FixtureMissError, LlmTransportError) as exc:
            if not q.terms:
                failures.append((q.id, str(exc)))
        updated.append(
            corpus_mod.QueryRecord(
                id=q.id,
                original_text=q.original_text,
                terms=tuple(terms),
                reformulated_text=reformulated,
                tokens=q.tokens,
            )
        )
    corpus_mod.save_queries(updated, cfg.queries)
    n_terms = sum(1 for q in updated if q.terms)
    print(
        f"expanded {len(updated)} queries ({n_terms} with terms, "
        f"{client.network_calls} network calls)"
    )
    for q_id, msg in failures:
        print(f"warning: query {q_id}: {msg}", file=sys.stderr)
    return 1 if failures else 0


def _load_pools(cfg: PipelineConfig) -> dict[str, list[str]]:
    """Candidate pools implied by the persisted BM25 table, in rank order."""
    table = semantic.load_scores(cfg.score_path("bm25"), "bm25")
    pools: dict[str, list[tuple[str, float]]] = {}
    for (q_id, a_id), score in table.entries.items():
        pools.setdefault(q_id, []).append((a_id, score))
    return {
        q: [a for a, _ in sorted(rows, key=lambda kv: (-kv[1], kv[0]))]
        for q, rows in pools.items()
    }


def cmd_score(cfg: PipelineConfig, no_clobber: bool = False) -> None:
    if not os.path.exists(cfg.index_path):
        raise FileNotFoundError(f"index not built yet: {cfg.index_path}")
    index = lexical.load_index(cfg.index_path)
    articles = {a.id: a for a in corpus_mod.load_corpus(cfg.corpus)}
    queries = corpus_mod.load_queries(cfg.queries)
    os.makedirs(cfg.scores_dir, exist_ok=True)
    os.makedirs(os.path.dirname(cfg.export_path), exist_ok=True)

    bm25_path = cfg.score_path("bm25")
    pools: dict[str, list[str]] = {}
    bm25_entries: dict[tuple[str, str], float] = {}
    export_rows: list[tuple[str, str, int]] = []
    for q in queries:
        _, expanded_tokens = _query_tokens(q, cfg.tokenizer)
        ranked = lexical.top_k(index, cfg.bm25, expanded_tokens, cfg.pool_size)
        pools[q.id] = [a for a, _ in ranked]
        for a_id, score in ranked:
            bm25_entries[(q.id, a_id)] = score
        for rank, (a_id, _) in enumerate(ranked[: cfg.export_pool_size], start=1):
            export_rows.append((q.id, a_id, rank))

    if not (no_clobber and os.path.exists(bm25_path)):
        semantic.save_scores(
            semantic.ScoreTable("bm25", bm25_entries), bm25_path
        )
    with open(cfg.export_path, "w", encoding="utf-8") as fh:
        for q_id, a_id, rank in export_rows:
            fh.write(f"{q_id}\t{a_id}\t{rank}\n")

    for scorer in ("origin", "reform"):
        out_path = cfg.score_path(scorer)
        if no_clobber and os.path.exists(out_path):
            continue
        table = _semantic_table(cfg, scorer, queries, articles, pools)
        semantic.save_scores(table, out_path)
    print(f"scored {len(queries)} queries over top-{cfg.pool_size} pools -> {cfg.scores_dir}")


def _semantic_table(cfg, scorer, queries, articles, pools) -> semantic.ScoreTable:
    """Semantic scores over the pools: precomputed file if given, else service."""
    def query_text(q):
        return q.original_text if scorer == "origin" else q.reformulated_text

    wanted = {
        (q.id, a_id)
        for q in queries
        if query_text(q)
        for a_id in pools.get(q.id, ())
    }
    if scorer in cfg.score_files:
        full = semantic.load_scores(cfg.score_files[scorer], scorer)
        entries = {k: v for k, v in full.entries.items() if k in wanted}
        return semantic.ScoreTable(scorer, entries)
    if scorer in cfg.scoring:
        by_id = {q.id: q for q in queries}
        pairs = [
            (query_text(by_id[q_id]), articles[a_id].text, q_id, a_id)
            for (q_id, a_id) in sorted(wanted)
        ]
        if not pairs:
            return semantic.ScoreTable(scorer, {})
        return semantic.request_scores(pairs, cfg.scoring[scorer], scorer_name=scorer)
    raise ValueError(
        f"no source for {scorer!r} scores: provide score_files.{scorer} "
        f"or scoring.{scorer} in the config"
    )


def split_query_ids(query_ids: list[str], fraction: float, seed: int) -> tuple[list[str], list[str]]:
    """Seeded (train, validation) split; ordering by salted SHA-256 of the id."""
    def key(q_id: str) -> str:
        return hashlib.sha256(f"{seed}:{q_id}".encode("utf-8")).hexdigest()

    ordered = sorted(query_ids, key=key)
    n_val = max(1, round(fraction * len(ordered)))
    return ordered[n_val:], ordered[:n_val]


def _load_tables(cfg: PipelineConfig) -> dict[str, semantic.ScoreTable]:
    return {
        name: semantic.load_scores(cfg.score_path(name), name)
        for name in ("origin", "bm25", "reform")
    }


def cmd_tune(cfg: PipelineConfig, no_clobber: bool = False, variant: int | None = None) -> None:
    articles = corpus_mod.load_corpus(cfg.corpus)
    queries = corpus_mod.load_queries(cfg.queries)
    gold = corpus_mod.load_qrels(cfg.qrels)
    corpus_mod.validate_dataset(articles, queries, gold)
    tables = _load_tables(cfg)
    pools = _load_pools(cfg)

    labeled = sorted(q.id for q in queries if q.id in gold)
    train_ids, val_ids = split_query_ids(labeled, cfg.validation_fraction, cfg.seed)
    if not val_ids:
        raise ValueError("validation slice is empty")
    _write_json(
        cfg.split_path,
        {
            "train": train_ids,
            "validation": val_ids,
            "seed": cfg.seed,
            "fraction": cfg.validation_fraction,
        },
    )
    variants = [variant] if variant else [1, 2, 3]
    for v in variants:
        out_path = cfg.ensemble_path(v)
        if no_clobber and os.path.exists(out_path):
            continue
        config, f2 = ensemble_mod.grid_search(
            val_ids, gold, pools, tables, grid=cfg.grid, active=VARIANT_SCORERS[v]
        )
        _write_json(
            out_path,
            {
                "alpha": config.alpha,
                "beta": config.beta,
                "gamma": config.gamma,
                "threshold": config.threshold,
                "grid": {
                    "weight_step": cfg.grid.weight_step,
                    "threshold_step": cfg.grid.threshold_step,
                },
                "validation_f2": f2,
            },
        )
        print(
            f"variant {v}: alpha={config.alpha:.2f} beta={config.beta:.2f} "
            f"gamma={config.gamma:.2f} threshold={config.threshold:.2f} "
            f"validation F2={f2:.4f}"
        )


def _load_ensemble(cfg: PipelineConfig, variant: int) -> ensemble_mod.EnsembleConfig:
    path = cfg.ensemble_path(variant)
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return ensemble_mod.EnsembleConfig(
            alpha=raw["alpha"],
            beta=raw["beta"],
            gamma=raw["gamma"],
            threshold=raw["threshold"],
        )
    if variant == 3 and cfg.ensemble is not None:
        return cfg.ensemble
    raise FileNotFoundError(f"no tuned config for variant {variant}: run 'tune' first")


def cmd_evaluate(cfg: PipelineConfig, no_clobber: bool = False, variant: int | None = None) -> None:
    articles = corpus_mod.load_corpus(cfg.corpus)
    queries = corpus_mod.load_queries(cfg.queries)
    gold = corpus_mod.load_qrels(cfg.qrels)
    corpus_mod.validate_dataset(articles, queries, gold)
    tables = _load_tables(cfg)
    pools = _load_pools(cfg)
    eval_pools = {q: p for q, p in pools.items() if q in gold}
    os.makedirs(cfg.reports_dir, exist_ok=True)

    variants = [variant] if variant else [1, 2, 3]
    reports: dict[str, evalmetrics.EvalReport] = {}
    for v in variants:
        econfig = _load_ensemble(cfg, v)
        fused = ensemble_mod.fuse_rankings(econfig, eval_pools, tables)
        report = evalmetrics.evaluate_selection(fused.selected, gold)
        name = "+".join(VARIANT_SCORERS[v])
        reports[f"variant{v} ({name})"] = report
        _write_json(
            os.path.join(cfg.reports_dir, f"variant{v}.json"),
            {
                "ensemble": {
                    "alpha": econfig.alpha,
                    "beta": econfig.beta,
                    "gamma": econfig.gamma,
                    "threshold": econfig.threshold,
                },
                "report": evalmetrics.report_to_dict(report),
            },
        )
        with open(
            os.path.join(cfg.reports_dir, f"variant{v}_per_query.tsv"),
            "w",
            encoding="utf-8",
        ) as fh:
            for q_id, (p, r, f2) in sorted(report.per_query.items()):
                picked = ",".join(sorted(fused.selected[q_id]))
                fh.write(f"{q_id}\t{p:.6f}\t{r:.6f}\t{f2:.6f}\t{picked}\n")

    summary = evalmetrics.format_table(reports)
    with open(os.path.join(cfg.reports_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(summary)
    print(summary, end="")
    figures.plot_variant_metrics(
        reports, os.path.join(cfg.reports_dir, "variants.png")
    )
    _recall_report(cfg, gold)


def _recall_report(cfg: PipelineConfig, gold) -> None:
    """Recall@k of BM25 with original vs term-expanded queries, plus figure."""
    index = lexical.load_index(cfg.index_path)
    queries = corpus_mod.load_queries(cfg.queries)
    rankings = {"original": {}, "term-expanded": {}}
    max_k = max(cfg.recall_ks)
    for q in queries:
        if q.id not in gold:
            continue
        base, expanded = _query_tokens(q, cfg.tokenizer)
        rankings["original"][q.id] = [
            a for a, _ in lexical.top_k(index, cfg.bm25, base, max_k)
        ]
        rankings["term-expanded"][q.id] = [
            a for a, _ in lexical.top_k(index, cfg.bm25, expanded, max_k)
        ]
    curves = {}
    rows = []
    for form, ranks in rankings.items():
        points = []
        for k in cfg.recall_ks:
            macro, micro = evalmetrics.recall_at_k(ranks, gold, k)
            points.append((k, macro))
            rows.append((form, k, macro, micro))
        curves[form] = points
    with open(
        os.path.join(cfg.reports_dir, "recall_at_k.tsv"), "w", encoding="utf-8"
    ) as fh:
        fh.write("query_form\tk\tmacro_recall\tmicro_recall\n")
        for form, k, macro, micro in rows:
            fh.write(f"{form}\t{k}\t{macro:.6f}\t{micro:.6f}\n")
    figures.plot_recall_curves(
        curves, os.path.join(cfg.reports_dir, "recall_at_k.png")
    )


def cmd_run_all(cfg: PipelineConfig, no_clobber: bool = False) -> int:
    cmd_index(cfg, no_clobber)
    rc = cmd_expand(cfg, no_clobber)
    cmd_score(cfg, no_clobber)
    cmd_tune(cfg, no_clobber)
    cmd_evaluate(cfg, no_clobber)
    return rc


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="statuterank", description="Statutory article retrieval pipeline"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("index", "expand", "score", "tune", "evaluate", "run-all"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="pipeline config JSON")
        p.add_argument("--no-clobber", action="store_true")
        if name in ("tune", "evaluate"):
            p.add_argument("--variant", type=int, choices=(1, 2, 3))
    args = parser.parse_args(argv)
    cfg = load_config(args.config)
    if args.command == "index":
        cmd_index(cfg, args.no_clobber)
    elif args.command == "expand":
        return cmd_expand(cfg, args.no_clobber)
    elif args.command == "score":
        cmd_score(cfg, args.no_clobber)
    elif args.command == "tune":
        cmd_tune(cfg, args.no_clobber, args.variant)
    elif args.command == "evaluate":
        cmd_evaluate(cfg, args.no_clobber, args.variant)
    elif args.command == "run-all":
        return cmd_run_all(cfg, args.no_clobber)
    return 0


if __name__ == "__main__":
    sys.exit(main())
