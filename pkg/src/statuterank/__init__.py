"""Statutory article retrieval: lexical ranking, LLM query expansion, score fusion."""

__version__ = "0.1.0"
