"""Cross-encoder rerankers for statute retrieval.

Builds labelled (query, article) training pairs from retrieval exports,
fine-tunes a BERT-style sequence classifier on them, and serves relevance
probabilities over a small HTTP API.
"""

from xencoder.pairs import PairBuildError, TrainingPair, build_training_pairs

__all__ = ["PairBuildError", "TrainingPair", "build_training_pairs"]
