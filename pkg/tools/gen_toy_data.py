#!/usr/bin/env python3
"""Regenerate the bundled toy dataset under data/toy/.

Produces the corpus, queries, gold labels, the LLM fixture cache (so the
pipeline runs offline), and handcrafted semantic score tables. Deterministic;
rerunning produces identical files except for cache timestamps.
"""

from __future__ import annotations

import json
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from statuterank.expand import DEFAULT_TEMPLATES, LlmClient, LlmEndpointConfig

TOY_DIR = os.path.join(os.path.dirname(__file__), "..", "data", "toy")

ARTICLES = [
    ("a01", "A person whose possession has been taken by another may demand the return of the thing by an action for recovery of possession."),
    ("a02", "A contract of sale becomes effective when one party promises to transfer ownership of property and the other party promises to pay the purchase price."),
    ("a03", "A lease becomes effective when the lessor promises the lessee the use of a thing and the lessee promises to pay rent for it."),
    ("a04", "A mortgagee has the right to receive satisfaction of the secured claim from the mortgaged immovable property in preference to other creditors."),
    ("a05", "A guarantor assumes the obligation to perform the obligation of the principal debtor when the debtor fails to perform it."),
    ("a06", "A manifestation of intention made by an agent within the scope of the authority granted binds the principal."),
    ("a07", "A claim is extinguished by prescription if the creditor does not exercise the right within ten years from the time it became exercisable."),
    ("a08", "A person who intentionally or negligently infringes the rights of another is liable in tort to compensate the resulting damages."),
    ("a09", "An heir succeeds to all rights and duties attached to the property of the decedent at the time of commencement of succession."),
    ("a10", "Either spouse may file a suit for divorce when there is a grave reason that makes the continuation of the marriage difficult."),
    ("a11", "The holder of an easement may use the servient land of another for the convenience of the dominant land according to the purpose of the easement."),
    ("a12", "A manifestation of intention induced by fraud or duress may be rescinded and the contract becomes void when rescinded."),
]

# id, original_text, extracted terms (fixture), reformulation (fixture), gold
QUERIES = [
    (
        "q1",
        "A lets B use his bicycle and B promises to pay rent for it. Later, C takes the bicycle away from B. Can A demand that C return the bicycle?",
        ["recovery of possession"],
        "The legal concept relevant to this query is an action for recovery of possession. A person whose possession of a thing has been taken by another may demand the return of the thing from the taker.",
        ["a01"],
    ),
    (
        "q2",
        "D hands over his shop to E in exchange for money to be paid next month. When does their deal start to bind them?",
        ["contract of sale", "transfer of ownership", "purchase price"],
        "This query concerns a contract of sale: one party promises to transfer ownership of property and the other promises to pay the purchase price, and the contract becomes effective upon those promises.",
        ["a02"],
    ),
    (
        "q3",
        "F lets G live in her apartment for a monthly payment. What kind of agreement is formed?",
        ["lease", "lessor and lessee", "rent"],
        "The arrangement is a lease: the lessor promises the lessee the use of a thing and the lessee promises to pay rent for it.",
        ["a03"],
    ),
    (
        "q4",
        "A bank lent money to H against H's house, and J also promised the bank to pay if H cannot. If H defaults, what are the bank's options?",
        ["mortgage", "secured claim", "guarantor", "obligation of the principal debtor"],
        "Two concepts apply: a mortgage, under which the mortgagee receives satisfaction of the secured claim from the immovable property in preference to other creditors, and a guarantee, under which the guarantor performs the obligation of the principal debtor on default.",
        ["a04", "a05"],
    ),
    (
        "q5",
        "J promised the bank to pay K's debt if K does not. What is J's duty when K defaults?",
        ["guarantee", "duty of a surety"],
        "This is a guarantee: the guarantor assumes the obligation to perform the obligation of the principal debtor when the debtor fails to perform it.",
        ["a05"],
    ),
    (
        "q6",
        "L asked M to buy a car in L's name, and M signed the deal with N. Who is bound by M's signature?",
        ["agent", "authority", "manifestation of intention binds the principal"],
        "This concerns agency: a manifestation of intention made by an agent within the scope of the authority granted binds the principal, so L is bound by M's signature.",
        ["a06"],
    ),
    (
        "q7",
        "O never asked P to repay a loan for twelve years. Can P refuse to pay now?",
        ["prescription", "extinguished claim", "exercise of the right within ten years"],
        "The relevant concept is extinctive prescription: a claim is extinguished if the creditor does not exercise the right within ten years from the time it became exercisable.",
        ["a07"],
    ),
    (
        "q8",
        "Q crashed into R's fence while texting and broke it. What can R claim from Q?",
        ["tort", "negligence", "compensate damages"],
        "This is a tort: a person who intentionally or negligently infringes the rights of another is liable to compensate the resulting damages.",
        ["a08"],
    ),
]

# Queries each semantic scorer separates well; elsewhere it is noisy.
ORIGIN_STRONG = {"q1", "q2", "q3", "q4", "q5"}
REFORM_STRONG = {"q4", "q5", "q6", "q7", "q8"}

# Scorer actively misled on a query: the named wrong article scores highest.
MISLEAD = {"origin": {"q5": "a07"}, "reform": {"q1": "a03"}}


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def make_score_table(strong_queries, mislead, rng):
    rows = []
    gold = {q_id: set(g) for q_id, _, _, _, g in QUERIES}
    for q_id, _, _, _, _ in QUERIES:
        for a_id, _ in ARTICLES:
            noise = rng.random()
            if q_id in mislead:
                if a_id == mislead[q_id]:
                    score = 0.9 + 0.05 * noise
                elif a_id in gold[q_id]:
                    score = 0.45 + 0.05 * noise
                else:
                    score = 0.05 + 0.15 * noise
            elif a_id in gold[q_id]:
                score = 0.82 + 0.15 * noise if q_id in strong_queries else 0.35 + 0.3 * noise
            else:
                score = 0.05 + 0.3 * noise if q_id in strong_queries else 0.1 + 0.55 * noise
            rows.append((q_id, a_id, round(score, 6)))
    return rows


def main():
    os.makedirs(TOY_DIR, exist_ok=True)
    os.makedirs(os.path.join(TOY_DIR, "scores"), exist_ok=True)

    write_jsonl(
        os.path.join(TOY_DIR, "corpus.jsonl"),
        [{"id": a_id, "text": text} for a_id, text in ARTICLES],
    )
    write_jsonl(
        os.path.join(TOY_DIR, "queries.jsonl"),
        [{"id": q_id, "original_text": text} for q_id, text, _, _, _ in QUERIES],
    )
    with open(os.path.join(TOY_DIR, "qrels.tsv"), "w", encoding="utf-8") as fh:
        for q_id, _, _, _, gold in QUERIES:
            for a_id in gold:
                fh.write(f"{q_id}\t{a_id}\n")

    # LLM fixture cache: one entry per (template, query), so the pipeline
    # expands queries with zero network calls.
    llm_cfg = LlmEndpointConfig(model="fixture-gemini", language="en")
    client = LlmClient(llm_cfg, os.path.join(TOY_DIR, "llm_cache"))
    term_tpl = DEFAULT_TEMPLATES[("term-extraction", "en")]
    reform_tpl = DEFAULT_TEMPLATES[("reformulation", "en")]
    for q_id, text, terms, reformulation, _ in QUERIES:
        raw = json.dumps({"foo": terms}, ensure_ascii=False)
        client._write_cache(client._fingerprint(term_tpl, text), raw, terms)
        client._write_cache(client._fingerprint(reform_tpl, text), reformulation, ())

    rng = random.Random(20240917)
    for scorer, strong in (("origin", ORIGIN_STRONG), ("reform", REFORM_STRONG)):
        rows = make_score_table(strong, MISLEAD[scorer], rng)
        with open(os.path.join(TOY_DIR, "scores", f"{scorer}.tsv"), "w", encoding="utf-8") as fh:
            for q_id, a_id, score in rows:
                fh.write(f"{q_id}\t{a_id}\t{score}\n")

    config = {
        "corpus": "corpus.jsonl",
        "queries": "queries.jsonl",
        "qrels": "qrels.tsv",
        "workdir": "out",
        "cache_dir": "llm_cache",
        "tokenizer": "unicode-basic",
        "bm25": {"k1": 1.2, "b": 0.75},
        "pool_size": 10,
        "export_pool_size": 10,
        "recall_ks": [1, 2, 3, 5, 10],
        "llm": {"model": "fixture-gemini", "language": "en", "fixture_only": True},
        "score_files": {"origin": "scores/origin.tsv", "reform": "scores/reform.tsv"},
        "grid": {"weight_step": 0.05, "threshold_step": 0.01},
        "seed": 13,
        "validation_fraction": 0.2,
    }
    with open(os.path.join(TOY_DIR, "config.json"), "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2)
        fh.write("\n")
    print(f"wrote toy dataset to {os.path.normpath(TOY_DIR)}")


if __name__ == "__main__":
    main()
