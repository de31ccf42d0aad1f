"""Pipeline configuration: a single JSON file drives every CLI command.

Relative paths are resolved against the directory containing the config
file. Secrets never live in the config; LLM auth is an environment-variable
name (``auth_env``).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .ensemble import EnsembleConfig, GridSpec
from .expand import LlmEndpointConfig
from .lexical import BM25Params
from .semantic import ScoringEndpointConfig


@dataclass
class PipelineConfig:
    corpus: str
    queries: str
    qrels: str
    workdir: str
    cache_dir: str
    tokenizer: str = "unicode-basic"
    bm25: BM25Params = field(default_factory=BM25Params)
    pool_size: int = 100
    export_pool_size: int = 30
    recall_ks: tuple[int, ...] = (1, 2, 3, 5, 10)
    llm: LlmEndpointConfig = field(default_factory=LlmEndpointConfig)
    fixture_only: bool = True
    scoring: dict[str, ScoringEndpointConfig] = field(default_factory=dict)
    score_files: dict[str, str] = field(default_factory=dict)
    grid: GridSpec = field(default_factory=GridSpec)
    ensemble: EnsembleConfig | None = None
    seed: int = 13
    validation_fraction: float = 0.2

    def __post_init__(self):
        if self.pool_size < 1:
            raise ValueError("pool_size must be >= 1")

    # Derived output locations inside workdir
    @property
    def index_path(self) -> str:
        return os.path.join(self.workdir, "index.json")

    @property
    def scores_dir(self) -> str:
        return os.path.join(self.workdir, "scores")

    def score_path(self, scorer: str) -> str:
        return os.path.join(self.scores_dir, f"{scorer}.tsv")

    @property
    def export_path(self) -> str:
        return os.path.join(self.workdir, "export", "bm25_top.tsv")

    @property
    def split_path(self) -> str:
        return os.path.join(self.workdir, "split.json")

    def ensemble_path(self, variant: int) -> str:
        return os.path.join(self.workdir, f"ensemble.v{variant}.json")

    @property
    def reports_dir(self) -> str:
        return os.path.join(self.workdir, "reports")


def load_config(path) -> PipelineConfig:
    base = os.path.dirname(os.path.abspath(path))
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    missing = [k for k in ("corpus", "queries", "qrels") if k not in raw]
    if missing:
        raise ValueError(f"{path}: missing required config keys: {missing}")

    scoring = {
        name: ScoringEndpointConfig(**cfg)
        for name, cfg in (raw.get("scoring") or {}).items()
    }
    score_files = {
        name: resolve(p) for name, p in (raw.get("score_files") or {}).items()
    }
    llm_raw = dict(raw.get("llm") or {})
    fixture_only = bool(llm_raw.pop("fixture_only", not llm_raw.get("base_url")))
    ensemble = EnsembleConfig(**raw["ensemble"]) if raw.get("ensemble") else None

    return PipelineConfig(
        corpus=resolve(raw["corpus"]),
        queries=resolve(raw["queries"]),
        qrels=resolve(raw["qrels"]),
        workdir=resolve(raw.get("workdir", "out")),
        cache_dir=resolve(raw.get("cache_dir", "llm_cache")),
        tokenizer=raw.get("tokenizer", "unicode-basic"),
        bm25=BM25Params(**(raw.get("bm25") or {})),
        pool_size=int(raw.get("pool_size", 100)),
        export_pool_size=int(raw.get("export_pool_size", 30)),
        recall_ks=tuple(raw.get("recall_ks", (1, 2, 3, 5, 10))),
        llm=LlmEndpointConfig(**llm_raw),
        fixture_only=fixture_only,
        scoring=scoring,
        score_files=score_files,
        grid=GridSpec(**(raw.get("grid") or {})),
        ensemble=ensemble,
        seed=int(raw.get("seed", 13)),
        validation_fraction=float(raw.get("validation_fraction", 0.2)),
    )
