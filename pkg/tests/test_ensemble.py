import random

import pytest

from statuterank.ensemble import (
    EnsembleConfig,
    FusedRanking,
    GridSpec,
    fuse,
    fuse_rankings,
    grid_search,
    minmax_normalize,
    select_relevant,
    simplex_grid,
    threshold_grid,
)
from statuterank.semantic import ScoreTable


def test_minmax_basic():
    got = minmax_normalize([("a", 2.0), ("b", 4.0), ("c", 6.0)])
    assert got == [("a", 0.0), ("b", 0.5), ("c", 1.0)]


def test_minmax_constant_input_all_zero():
    assert minmax_normalize([("a", 3.0), ("b", 3.0), ("c", 3.0)]) == [
        ("a", 0.0),
        ("b", 0.0),
        ("c", 0.0),
    ]


def test_minmax_single_element():
    assert minmax_normalize([("a", 7.0)]) == [("a", 0.0)]


def test_minmax_bounds():
    rng = random.Random(5)
    scores = [(f"a{i}", rng.uniform(-100, 100)) for i in range(50)]
    for _, v in minmax_normalize(scores):
        assert 0.0 <= v <= 1.0


def test_config_simplex_invariant():
    EnsembleConfig(0.4, 0.3, 0.3, 0.5)
    with pytest.raises(ValueError):
        EnsembleConfig(0.5, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        EnsembleConfig(-0.2, 0.6, 0.6, 0.5)


def test_fuse_identity_corner():
    cfg = EnsembleConfig(1.0, 0.0, 0.0, 0.5)
    assert fuse(cfg, 0.73, 0.1, 0.9) == 0.73


def test_fuse_hand_value():
    cfg = EnsembleConfig(0.4, 0.3, 0.3, 0.5)
    assert fuse(cfg, 1.0, 0.0, 0.5) == pytest.approx(0.55)


def test_fuse_convexity():
    cfg = EnsembleConfig(0.2, 0.5, 0.3, 0.5)
    for v in (0.0, 0.37, 1.0):
        assert fuse(cfg, v, v, v) == pytest.approx(v)


def test_fuse_monotone():
    cfg = EnsembleConfig(0.3, 0.3, 0.4, 0.5)
    base = fuse(cfg, 0.4, 0.4, 0.4)
    assert fuse(cfg, 0.5, 0.4, 0.4) >= base
    assert fuse(cfg, 0.4, 0.5, 0.4) >= base
    assert fuse(cfg, 0.4, 0.4, 0.5) >= base


def test_select_relevant_strict_threshold():
    assert select_relevant([("a", 0.9), ("b", 0.4)], 0.5) == {"a"}
    assert select_relevant([("a", 0.5), ("b", 0.4)], 0.5) == {"a"}  # fallback: 0.5 not > 0.5


def test_select_relevant_top1_fallback():
    assert select_relevant([("a", 0.3), ("b", 0.2)], 0.5) == {"a"}


def test_select_relevant_zero_threshold():
    assert select_relevant([("a", 0.9), ("b", 0.1)], 0.0) == {"a", "b"}


def test_select_relevant_empty_ranking():
    with pytest.raises(ValueError):
        select_relevant([], 0.5)


def _tables(entries_by_scorer):
    return {
        name: ScoreTable(name, dict(entries))
        for name, entries in entries_by_scorer.items()
    }


def test_fuse_rankings_sorted_and_never_empty():
    pools = {"q1": ["a1", "a2", "a3"]}
    tables = _tables(
        {
            "origin": {("q1", "a1"): 0.2, ("q1", "a2"): 0.9, ("q1", "a3"): 0.5},
            "bm25": {("q1", "a1"): 5.0, ("q1", "a2"): 1.0, ("q1", "a3"): 3.0},
            "reform": {},
        }
    )
    fused = fuse_rankings(EnsembleConfig(0.5, 0.5, 0.0, 0.99), pools, tables)
    ranking = fused.rankings["q1"]
    assert [v for _, v in ranking] == sorted((v for _, v in ranking), reverse=True)
    assert fused.selected["q1"]  # top-1 fallback


def test_simplex_grid_corners_only():
    combos = simplex_grid(1.0)
    assert combos == [(0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0)]


def test_simplex_grid_active_restriction():
    combos = simplex_grid(0.5, active=("origin", "bm25"))
    assert combos == [(0.0, 1.0, 0.0), (0.5, 0.5, 0.0), (1.0, 0.0, 0.0)]


def test_threshold_grid_half_open():
    ts = threshold_grid(0.25)
    assert ts == [0.0, 0.25, 0.5, 0.75]


def _oracle_setup(n_queries=4, n_cands=10, seed=0):
    """Synthetic tables: "origin" perfectly separates gold, others are noise."""
    rng = random.Random(seed)
    pools, gold = {}, {}
    origin, bm25, reform = {}, {}, {}
    for i in range(n_queries):
        q = f"q{i}"
        cands = [f"a{i}_{j}" for j in range(n_cands)]
        pools[q] = cands
        gold[q] = set(rng.sample(cands, 2))
        for a in cands:
            origin[(q, a)] = 1.0 if a in gold[q] else 0.0
            bm25[(q, a)] = rng.random()
            reform[(q, a)] = rng.random()
    tables = _tables({"origin": origin, "bm25": bm25, "reform": reform})
    return list(pools), gold, pools, tables


def test_grid_search_recovers_oracle_scorer():
    qids, gold, pools, tables = _oracle_setup()
    config, f2 = grid_search(qids, gold, pools, tables, grid=GridSpec(0.25, 0.1))
    assert f2 == 1.0
    assert config.alpha > 0


def test_grid_search_exhaustive_no_better_point():
    qids, gold, pools, tables = _oracle_setup(n_queries=3, n_cands=6, seed=2)
    grid = GridSpec(0.25, 0.1)
    best_config, best_f2 = grid_search(qids, gold, pools, tables, grid=grid)
    # re-evaluate every grid point through the public fusion path
    from statuterank.evalmetrics import evaluate_selection

    for combo in simplex_grid(grid.weight_step):
        for t in threshold_grid(grid.threshold_step):
            cfg = EnsembleConfig(*combo, t)
            fused = fuse_rankings(cfg, pools, tables)
            report = evaluate_selection(fused.selected, gold)
            assert report.macro_f2 <= best_f2 + 1e-12


def test_grid_search_corner_grid():
    qids, gold, pools, tables = _oracle_setup(n_queries=2, n_cands=5, seed=3)
    config, _ = grid_search(qids, gold, pools, tables, grid=GridSpec(1.0, 0.5))
    assert (config.alpha, config.beta, config.gamma) in {
        (0.0, 0.0, 1.0),
        (0.0, 1.0, 0.0),
        (1.0, 0.0, 0.0),
    }


def test_grid_search_tie_prefers_lexicographic_smallest():
    # every scorer is identical: all grid points tie, smallest combo wins
    pools = {"q": ["a", "b"]}
    gold = {"q": {"a"}}
    same = {("q", "a"): 1.0, ("q", "b"): 0.0}
    tables = _tables({"origin": dict(same), "bm25": dict(same), "reform": dict(same)})
    config, f2 = grid_search(["q"], gold, pools, tables, grid=GridSpec(0.5, 0.25))
    assert f2 == 1.0
    assert (config.alpha, config.beta, config.gamma, config.threshold) == (0.0, 0.0, 1.0, 0.0)


def test_grid_search_empty_validation():
    with pytest.raises(ValueError):
        grid_search([], {}, {}, _tables({"origin": {}, "bm25": {}, "reform": {}}))


def test_ranking_invariant_under_affine_transform_of_one_scorer():
    rng = random.Random(42)
    for trial in range(20):
        cands = [f"a{j}" for j in range(8)]
        pools = {"q": cands}
        raw = {
            name: {("q", a): rng.uniform(-5, 5) for a in cands}
            for name in ("origin", "bm25", "reform")
        }
        cfg = EnsembleConfig(0.3, 0.4, 0.3, 0.5)
        base = fuse_rankings(cfg, pools, _tables(raw))
        scale, shift = rng.uniform(0.1, 9.0), rng.uniform(-10, 10)
        name = ("origin", "bm25", "reform")[trial % 3]
        transformed = {
            n: (
                {k: scale * v + shift for k, v in vals.items()} if n == name else vals
            )
            for n, vals in raw.items()
        }
        moved = fuse_rankings(cfg, pools, _tables(transformed))
        assert [a for a, _ in base.rankings["q"]] == [a for a, _ in moved.rankings["q"]]
