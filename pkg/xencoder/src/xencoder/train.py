"""Cross-encoder fine-tuning.

Two reranker variants share this loop; they differ only in which query
text was used when the pairs were built.  The default base model is
multilingual BERT; ``base="scratch-tiny"`` instead initializes a small
randomly-weighted BERT with a whitespace word-level tokenizer built from
the training pairs, which keeps tests fast and fully offline.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy
import torch
from tokenizers import Tokenizer, models, pre_tokenizers, processors
from transformers import (
    AutoModelForSequenceClassification,
    AutoTokenizer,
    BertConfig,
    BertForSequenceClassification,
    PreTrainedTokenizerFast,
)

from xencoder.pairs import TrainingPair

SCRATCH_TINY = "scratch-tiny"
DEFAULT_BASE = "bert-base-multilingual-cased"


class TrainingError(ValueError):
    """Raised for unusable training configurations or data."""


@dataclass
class TrainConfig:
    """Hyperparameters for one fine-tuning run."""

    variant: str = "origin"
    base: str = DEFAULT_BASE
    epochs: int = 3
    batch_size: int = 16
    learning_rate: float = 2e-5
    max_length: int = 512
    seed: int = 42
    scratch: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.epochs < 1:
            raise TrainingError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise TrainingError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise TrainingError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.max_length < 8:
            raise TrainingError(f"max_length must be >= 8, got {self.max_length}")


def _seed_everything(seed: int) -> None:
    random.seed(seed)
    numpy.random.seed(seed)
    torch.manual_seed(seed)


def _scratch_tokenizer(pairs: list[TrainingPair]) -> PreTrainedTokenizerFast:
    """Build a word-level tokenizer whose vocabulary covers the pair texts."""
    vocab = {"[PAD]": 0, "[UNK]": 1, "[CLS]": 2, "[SEP]": 3}
    words: set[str] = set()
    for pair in pairs:
        words.update(pair.query_text.split())
        words.update(pair.article_text.split())
    for word in sorted(words):
        vocab.setdefault(word, len(vocab))
    tok = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.WhitespaceSplit()
    tok.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", 2), ("[SEP]", 3)],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=tok,
        pad_token="[PAD]",
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
    )


def _build_model_and_tokenizer(config: TrainConfig, pairs: list[TrainingPair]):
    if config.base == SCRATCH_TINY:
        tokenizer = _scratch_tokenizer(pairs)
        bert_config = BertConfig(
            vocab_size=len(tokenizer),
            hidden_size=config.scratch.get("hidden_size", 64),
            num_hidden_layers=config.scratch.get("num_hidden_layers", 2),
            num_attention_heads=config.scratch.get("num_attention_heads", 2),
            intermediate_size=config.scratch.get("intermediate_size", 128),
            max_position_embeddings=max(config.max_length, 64),
            num_labels=2,
        )
        model = BertForSequenceClassification(bert_config)
    else:
        tokenizer = AutoTokenizer.from_pretrained(config.base)
        model = AutoModelForSequenceClassification.from_pretrained(config.base, num_labels=2)
    return model, tokenizer


def _encode(tokenizer, pairs: list[TrainingPair], max_length: int):
    batch = tokenizer(
        [p.query_text for p in pairs],
        [p.article_text for p in pairs],
        padding=True,
        truncation="only_second",
        max_length=max_length,
        return_tensors="pt",
    )
    return batch


def train(
    pairs: list[TrainingPair],
    output_dir: str | Path,
    config: TrainConfig | None = None,
) -> Path:
    """Fine-tune a cross-encoder on ``pairs`` and save the artifact.

    Returns the artifact directory, which holds the model, the tokenizer
    and a ``metadata.json`` describing the run.
    """
    config = config or TrainConfig()
    config.validate()
    if not pairs:
        raise TrainingError("no training pairs")
    labels = {p.label for p in pairs}
    if labels != {0, 1}:
        raise TrainingError(
            "training pairs must contain both positive and negative labels, "
            f"got labels {sorted(labels)}"
        )

    _seed_everything(config.seed)
    model, tokenizer = _build_model_and_tokenizer(config, pairs)
    model.train()

    encoded = _encode(tokenizer, pairs, config.max_length)
    targets = torch.tensor([p.label for p in pairs], dtype=torch.long)
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)

    order = list(range(len(pairs)))
    rng = random.Random(config.seed)
    for _ in range(config.epochs):
        rng.shuffle(order)
        for start in range(0, len(order), config.batch_size):
            idx = torch.tensor(order[start : start + config.batch_size])
            inputs = {key: value[idx] for key, value in encoded.items()}
            outputs = model(**inputs, labels=targets[idx])
            optimizer.zero_grad()
            outputs.loss.backward()
            optimizer.step()

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    model.eval()
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    metadata = {
        "format_version": 1,
        "variant": config.variant,
        "base": config.base,
        "epochs": config.epochs,
        "batch_size": config.batch_size,
        "learning_rate": config.learning_rate,
        "max_length": config.max_length,
        "seed": config.seed,
        "n_pairs": len(pairs),
        "n_positive": sum(p.label for p in pairs),
    }
    with open(out / "metadata.json", "w", encoding="utf-8") as handle:
        json.dump(metadata, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return out


@dataclass
class ScoredModel:
    """A trained cross-encoder ready to score (query, article) pairs."""

    model: torch.nn.Module
    tokenizer: object
    max_length: int = 512

    @classmethod
    def load(cls, artifact_dir: str | Path) -> "ScoredModel":
        artifact_dir = Path(artifact_dir)
        meta_path = artifact_dir / "metadata.json"
        max_length = 512
        if meta_path.exists():
            with open(meta_path, encoding="utf-8") as handle:
                max_length = int(json.load(handle).get("max_length", 512))
        tokenizer = AutoTokenizer.from_pretrained(str(artifact_dir))
        model = AutoModelForSequenceClassification.from_pretrained(str(artifact_dir))
        model.eval()
        return cls(model=model, tokenizer=tokenizer, max_length=max_length)

    def score(self, pairs: list[tuple[str, str]], batch_size: int = 32) -> list[float]:
        """Return the positive-class probability for each (query, article)."""
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        scores: list[float] = []
        with torch.no_grad():
            for start in range(0, len(pairs), batch_size):
                chunk = pairs[start : start + batch_size]
                inputs = self.tokenizer(
                    [q for q, _ in chunk],
                    [a for _, a in chunk],
                    padding=True,
                    truncation="only_second",
                    max_length=self.max_length,
                    return_tensors="pt",
                )
                logits = self.model(**inputs).logits
                probs = torch.softmax(logits, dim=-1)[:, 1]
                scores.extend(float(v) for v in probs)
        return scores


def evaluate_accuracy(model: ScoredModel, pairs: list[TrainingPair]) -> float:
    """Fraction of pairs whose thresholded score (at 0.5) matches the label."""
    if not pairs:
        raise TrainingError("no evaluation pairs")
    scores = model.score([(p.query_text, p.article_text) for p in pairs])
    hits = sum(
        1 for p, s in zip(pairs, scores) if (s > 0.5) == (p.label == 1)
    )
    return hits / len(pairs)
