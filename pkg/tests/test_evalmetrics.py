import pytest

from statuterank.evalmetrics import (
    evaluate_selection,
    format_table,
    macro_average,
    prf2,
    recall_at_k,
    report_to_dict,
)


def test_prf2_perfect():
    assert prf2({"a1"}, {"a1"}) == (1.0, 1.0, 1.0)


def test_prf2_equal_p_r():
    assert prf2({"a1", "a2"}, {"a1", "a3"}) == (0.5, 0.5, 0.5)


def test_prf2_hand_value():
    # P = 0.8, R = 0.9 -> F2 = 5*0.72/(3.2+0.9) = 3.6/4.1
    # exact sets: 36 hits, 45 predicted, 40 gold
    hits = {f"h{i}" for i in range(36)}
    pred = hits | {f"fp{i}" for i in range(9)}
    gold = hits | {f"fn{i}" for i in range(4)}
    p, r, f2 = prf2(pred, gold)
    assert p == 0.8 and r == 0.9
    assert f2 == pytest.approx(0.878049, abs=1e-6)


def test_prf2_empty_prediction_and_zero_case():
    p, r, f2 = prf2(set(), {"a"})
    assert (p, r, f2) == (0.0, 0.0, 0.0)
    assert prf2({"b"}, {"a"}) == (0.0, 0.0, 0.0)


def test_prf2_empty_gold_rejected():
    with pytest.raises(ValueError):
        prf2({"a"}, set())


def test_f2_weights_recall_more_than_f1():
    p, r = 0.4, 0.9
    _, _, f2 = prf2(
        {f"h{i}" for i in range(36)} | {f"fp{i}" for i in range(54)},
        {f"h{i}" for i in range(36)} | {f"fn{i}" for i in range(4)},
    )
    f1 = 2 * p * r / (p + r)
    assert abs(f2 - r) < abs(f1 - r)


def test_macro_average_single_query():
    rep = macro_average({"q1": (0.5, 1.0, 0.833333)})
    assert rep.macro_precision == 0.5
    assert rep.macro_f2 == 0.833333
    assert rep.counts == 1


def test_macro_average_mean():
    rep = macro_average({"q1": (1, 1, 1.0), "q2": (0, 0, 0.0)})
    assert rep.macro_f2 == 0.5


def test_macro_f2_is_mean_of_per_query_f2():
    f2a = prf2({"g", "x"}, {"g"})[2]  # P=0.5, R=1
    f2b = prf2({"g"}, {"g", "m"})[2]  # P=1, R=0.5
    rep = macro_average({"q1": (1.0, 0.5, f2b), "q2": (0.5, 1.0, f2a)})
    assert rep.macro_f2 == pytest.approx((0.555556 + 0.833333) / 2, abs=1e-6)


def test_macro_average_empty():
    with pytest.raises(ValueError):
        macro_average({})


def test_evaluate_selection_requires_all_gold_queries():
    with pytest.raises(ValueError, match="q2"):
        evaluate_selection({"q1": {"a"}}, {"q1": {"a"}, "q2": {"b"}})


def test_recall_at_k_containment():
    rankings = {"q": ["b", "a", "c"]}
    gold = {"q": {"a"}}
    assert recall_at_k(rankings, gold, 1) == (0.0, 0.0)
    assert recall_at_k(rankings, gold, 2) == (1.0, 1.0)


def test_recall_at_k_monotone_in_k():
    rankings = {"q1": ["a", "b", "c", "d"], "q2": ["d", "c", "b", "a"]}
    gold = {"q1": {"b", "d"}, "q2": {"a"}}
    values = [recall_at_k(rankings, gold, k)[0] for k in range(1, 5)]
    assert values == sorted(values)


def test_recall_at_k_macro_vs_micro():
    rankings = {"q1": ["a", "b"], "q2": ["c", "d"]}
    gold = {"q1": {"a"}, "q2": {"c", "d", "x"}}
    macro, micro = recall_at_k(rankings, gold, 1)
    assert macro == pytest.approx((1.0 + 1 / 3) / 2)
    assert micro == pytest.approx(2 / 4)


def test_recall_at_k_full_ranking_hits_one():
    rankings = {"q": ["a", "b", "c"]}
    gold = {"q": {"a", "c"}}
    assert recall_at_k(rankings, gold, 3) == (1.0, 1.0)


def test_recall_at_k_missing_query():
    with pytest.raises(ValueError, match="q2"):
        recall_at_k({"q1": ["a"]}, {"q1": {"a"}, "q2": {"a"}}, 1)


def test_report_serialization_and_table():
    rep = macro_average({"q1": (1.0, 1.0, 1.0), "q2": (0.5, 1.0, 0.833333)})
    d = report_to_dict(rep)
    assert d["counts"] == 2
    assert d["per_query"]["q2"]["precision"] == 0.5
    table = format_table({"variant3": rep})
    assert "F2" in table.splitlines()[0]
    assert "variant3" in table
