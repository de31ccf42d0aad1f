import json
import os

import pytest

from statuterank.cli import main, split_query_ids
from statuterank.config import load_config


def run(*argv):
    return main(list(argv))


def test_missing_corpus_path_errors(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"corpus": "nope.jsonl", "queries": "q.jsonl", "qrels": "g.tsv"}))
    (tmp_path / "q.jsonl").write_text("")
    (tmp_path / "g.tsv").write_text("")
    with pytest.raises(FileNotFoundError, match="nope.jsonl"):
        run("index", "--config", str(cfg))


def test_config_requires_core_keys(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"corpus": "c.jsonl"}))
    with pytest.raises(ValueError, match="queries"):
        load_config(cfg)


def test_index_rerun_byte_identical(toy_dir):
    cfg = str(toy_dir / "config.json")
    run("index", "--config", cfg)
    first = (toy_dir / "out" / "index.json").read_bytes()
    run("index", "--config", cfg)
    assert (toy_dir / "out" / "index.json").read_bytes() == first


def test_expand_fully_cached_zero_network(toy_dir, capsys):
    assert run("expand", "--config", str(toy_dir / "config.json")) == 0
    out = capsys.readouterr().out
    assert "0 network calls" in out
    # idempotent: second run rewrites the same file
    before = (toy_dir / "queries.jsonl").read_bytes()
    assert run("expand", "--config", str(toy_dir / "config.json")) == 0
    assert (toy_dir / "queries.jsonl").read_bytes() == before


def test_expand_partial_failure_exits_nonzero(toy_dir):
    qpath = toy_dir / "queries.jsonl"
    with open(qpath, "a", encoding="utf-8") as fh:
        fh.write(json.dumps({"id": "q9", "original_text": "query with no fixture"}) + "\n")
    assert run("expand", "--config", str(toy_dir / "config.json")) == 1
    # other queries still got their terms
    rows = [json.loads(l) for l in qpath.read_text().splitlines()]
    by_id = {r["id"]: r for r in rows}
    assert by_id["q1"].get("terms")
    assert not by_id["q9"].get("terms")


def test_score_requires_index(toy_dir):
    run("expand", "--config", str(toy_dir / "config.json"))
    with pytest.raises(FileNotFoundError, match="index"):
        run("score", "--config", str(toy_dir / "config.json"))


def test_score_pool_bound_and_export(toy_dir):
    cfg = str(toy_dir / "config.json")
    run("index", "--config", cfg)
    run("expand", "--config", cfg)
    run("score", "--config", cfg)
    bm25 = (toy_dir / "out" / "scores" / "bm25.tsv").read_text().splitlines()
    assert len(bm25) <= 8 * 10  # queries x pool_size
    export = (toy_dir / "out" / "export" / "bm25_top.tsv").read_text().splitlines()
    q_id, a_id, rank = export[0].split("\t")
    assert rank == "1"


def test_score_skips_empty_reformulation(toy_dir):
    cfg = str(toy_dir / "config.json")
    run("index", "--config", cfg)
    run("expand", "--config", cfg)
    # blank out one query's reformulation: it must vanish from the reform table
    qpath = toy_dir / "queries.jsonl"
    rows = [json.loads(l) for l in qpath.read_text().splitlines()]
    rows[0].pop("reformulated_text", None)
    target = rows[0]["id"]
    with open(qpath, "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")
    run("score", "--config", cfg)
    reform = (toy_dir / "out" / "scores" / "reform.tsv").read_text()
    assert not any(line.startswith(target + "\t") for line in reform.splitlines())
    bm25 = (toy_dir / "out" / "scores" / "bm25.tsv").read_text()
    assert any(line.startswith(target + "\t") for line in bm25.splitlines())


def test_score_no_clobber_is_noop(toy_dir):
    cfg = str(toy_dir / "config.json")
    run("index", "--config", cfg)
    run("expand", "--config", cfg)
    run("score", "--config", cfg)
    path = toy_dir / "out" / "scores" / "bm25.tsv"
    path.write_text("sentinel\n")
    run("score", "--config", cfg, "--no-clobber")
    assert path.read_text() == "sentinel\n"
    run("score", "--config", cfg)
    assert path.read_text() != "sentinel\n"


def test_split_is_seeded_and_stable():
    ids = [f"q{i}" for i in range(10)]
    train1, val1 = split_query_ids(ids, 0.2, 13)
    train2, val2 = split_query_ids(ids, 0.2, 13)
    assert (train1, val1) == (train2, val2)
    assert len(val1) == 2
    assert sorted(train1 + val1) == ids
    _, val_other_seed = split_query_ids(ids, 0.2, 14)
    assert val1 != val_other_seed  # different seed, different slice (true for these ids)


def test_split_minimum_one_validation_query():
    _, val = split_query_ids(["a", "b"], 0.2, 1)
    assert len(val) == 1


def test_tune_rerun_identical(toy_dir):
    cfg = str(toy_dir / "config.json")
    for cmd in ("index", "expand", "score", "tune"):
        run(cmd, "--config", cfg)
    files = {
        name: (toy_dir / "out" / name).read_bytes()
        for name in ("ensemble.v1.json", "ensemble.v2.json", "ensemble.v3.json", "split.json")
    }
    run("tune", "--config", cfg)
    for name, blob in files.items():
        assert (toy_dir / "out" / name).read_bytes() == blob


def test_tune_single_variant(toy_dir):
    cfg = str(toy_dir / "config.json")
    for cmd in ("index", "expand", "score"):
        run(cmd, "--config", cfg)
    run("tune", "--config", cfg, "--variant", "1")
    out = toy_dir / "out"
    assert (out / "ensemble.v1.json").exists()
    assert not (out / "ensemble.v3.json").exists()
    tuned = json.loads((out / "ensemble.v1.json").read_text())
    assert tuned["gamma"] == 0.0  # variant 1 excludes the reform scorer
    assert "validation_f2" in tuned and "grid" in tuned


def test_evaluate_requires_tuned_config(toy_dir):
    cfg = str(toy_dir / "config.json")
    for cmd in ("index", "expand", "score"):
        run(cmd, "--config", cfg)
    with pytest.raises(FileNotFoundError, match="tune"):
        run("evaluate", "--config", cfg)


def test_run_all_produces_reports_and_figures(toy_dir):
    assert run("run-all", "--config", str(toy_dir / "config.json")) == 0
    reports = toy_dir / "out" / "reports"
    for name in (
        "variant1.json",
        "variant2.json",
        "variant3.json",
        "variant1_per_query.tsv",
        "summary.txt",
        "recall_at_k.tsv",
        "variants.png",
        "recall_at_k.png",
    ):
        assert (reports / name).exists(), name
