"""LLM-backed query expansion: legal-term extraction and query reformulation.

All LLM traffic goes through a content-addressed cache so test and CI runs
are hermetic: with a populated cache directory (fixture mode) the module
makes zero network calls.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field

import requests

from .corpus import QueryRecord, expand_text


class LlmTransportError(RuntimeError):
    """Request failed after all retries."""


class FixtureMissError(LookupError):
    """Fixture-only client asked for a prompt that is not in the cache."""


@dataclass(frozen=True)
class PromptTemplate:
    name: str  # "term-extraction" | "reformulation"
    language: str  # "ja" | "en"
    body: str

    def __post_init__(self):
        if self.body.count("{query}") != 1:
            raise ValueError("template body must contain exactly one {query}")

    def render(self, query_text: str) -> str:
        return self.body.replace("{query}", query_text)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.body.encode("utf-8")).hexdigest()


_JSON_SCHEMA_EXAMPLE = (
    "{\n"
    "  properties: {\n"
    "    foo: {\n"
    "      title: Foo, \n"
    "      description: a list of strings, \n"
    "      type: array, \n"
    "      items: {type: string}\n"
    "    }}, \n"
    "  required: [foo]}"
)

TERM_EXTRACTION_EN = PromptTemplate(
    name="term-extraction",
    language="en",
    body=(
        "Given a legal situation, find the relevant facts and legal concepts "
        "relevant to that situation:{query}\n\n"
        "The output must be formatted as a JSON instance conforming to "
        "the JSON schema below. For example, the schema\n" + _JSON_SCHEMA_EXAMPLE
    ),
)

TERM_EXTRACTION_JA = PromptTemplate(
    name="term-extraction",
    language="ja",
    body=(
        "法的な状況が与えられた場合、その状況に関連する適切な事実と法的概念を抽出します:{query}\n\n"
        "出力は、以下のJSONスキーマに準拠するJSONインスタンスとしてフォーマットする必要があります。"
        "例として、スキーマ \n" + _JSON_SCHEMA_EXAMPLE + "\nの場合、オブジェクト {foo: [bar, baz]}"
    ),
)

REFORMULATION_EN = PromptTemplate(
    name="reformulation",
    language="en",
    body=(
        "Given a legal situation, extract the relevant facts and legal "
        "concepts relevant to that situation:{query}"
    ),
)

REFORMULATION_JA = PromptTemplate(
    name="reformulation",
    language="ja",
    body="法的な状況が与えられた場合、その状況に関連する適切な事実と法的概念を抽出します:{query}",
)

DEFAULT_TEMPLATES = {
    ("term-extraction", "en"): TERM_EXTRACTION_EN,
    ("term-extraction", "ja"): TERM_EXTRACTION_JA,
    ("reformulation", "en"): REFORMULATION_EN,
    ("reformulation", "ja"): REFORMULATION_JA,
}


@dataclass(frozen=True)
class LlmEndpointConfig:
    base_url: str = ""
    model: str = ""
    auth_env: str = ""  # name of the env var holding the token
    auth_header: str = "Authorization"
    path: str = "/v1/chat/completions"
    timeout: float = 60.0
    max_retries: int = 3
    backoff: float = 1.0
    language: str = "ja"


@dataclass(frozen=True)
class LlmResponse:
    raw_text: str
    parsed_terms: tuple[str, ...]
    model_name: str
    cached: bool


def parse_term_list(raw_text: str) -> list[str] | None:
    """Parse the single array-of-strings property of a JSON reply.

    Returns None on any parse failure (caller degrades to empty terms).
    """
    text = raw_text.strip()
    if text.startswith("```"):
        lines = text.splitlines()
        lines = lines[1:]
        if lines and lines[-1].strip().startswith("```"):
            lines = lines[:-1]
        text = "\n".join(lines).strip()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        return None
    if not isinstance(obj, dict):
        return None
    candidates = [
        v
        for v in obj.values()
        if isinstance(v, list) and all(isinstance(x, str) for x in v)
    ]
    if len(candidates) != 1:
        return None
    terms = [t.strip() for t in candidates[0]]
    return [t for t in terms if t]


class LlmClient:
    """Chat-completions client with a file cache keyed by (model, template, query).

    With ``fixture_only=True`` the cache is the sole source of truth: a miss
    raises FixtureMissError and no network I/O ever happens.
    """

    def __init__(
        self,
        config: LlmEndpointConfig,
        cache_dir,
        fixture_only: bool = False,
        session=None,
        sleep=time.sleep,
    ):
        self.config = config
        self.cache_dir = str(cache_dir)
        self.fixture_only = fixture_only
        self.session = session or requests.Session()
        self._sleep = sleep
        self.network_calls = 0
        os.makedirs(self.cache_dir, exist_ok=True)

    def _fingerprint(self, template: PromptTemplate, query_text: str) -> str:
        return json.dumps(
            {
                "model": self.config.model,
                "template": template.digest,
                "query": query_text,
            },
            ensure_ascii=False,
            sort_keys=True,
        )

    def _cache_path(self, fingerprint: str) -> str:
        key = hashlib.sha256(fingerprint.encode("utf-8")).hexdigest()
        return os.path.join(self.cache_dir, f"{key}.json")

    def _read_cache(self, fingerprint: str) -> dict | None:
        path = self._cache_path(fingerprint)
        if not os.path.exists(path):
            return None
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def _write_cache(self, fingerprint: str, raw_text: str, parsed_terms) -> None:
        payload = {
            "request_fingerprint": fingerprint,
            "raw_text": raw_text,
            "parsed_terms": list(parsed_terms),
            "model_name": self.config.model,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        path = self._cache_path(fingerprint)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)

    def _request(self, prompt: str) -> str:
        url = self.config.base_url.rstrip("/") + self.config.path
        headers = {}
        if self.config.auth_env:
            token = os.environ.get(self.config.auth_env, "")
            headers[self.config.auth_header] = (
                f"Bearer {token}" if self.config.auth_header == "Authorization" else token
            )
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        last_exc = None
        for attempt in range(self.config.max_retries):
            try:
                self.network_calls += 1
                resp = self.session.post(
                    url, json=body, headers=headers, timeout=self.config.timeout
                )
                resp.raise_for_status()
                data = resp.json()
                return data["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_exc = exc
                if attempt + 1 < self.config.max_retries:
                    self._sleep(self.config.backoff * (2**attempt))
        raise LlmTransportError(f"LLM request failed after retries: {last_exc}")

    def complete(self, template: PromptTemplate, query_text: str) -> LlmResponse:
        fingerprint = self._fingerprint(template, query_text)
        cached = self._read_cache(fingerprint)
        if cached is not None:
            return LlmResponse(
                raw_text=cached["raw_text"],
                parsed_terms=tuple(cached.get("parsed_terms") or ()),
                model_name=cached.get("model_name", self.config.model),
                cached=True,
            )
        if self.fixture_only:
            raise FixtureMissError(
                f"no cached response for {template.name} / {query_text[:60]!r}"
            )
        raw_text = self._request(template.render(query_text))
        terms = ()
        if template.name == "term-extraction":
            terms = tuple(parse_term_list(raw_text) or ())
        self._write_cache(fingerprint, raw_text, terms)
        return LlmResponse(
            raw_text=raw_text,
            parsed_terms=terms,
            model_name=self.config.model,
            cached=False,
        )


def extract_terms(query: QueryRecord, client: LlmClient) -> list[str]:
    """Extract legal terms for a query; returns [] on LLM output that fails to parse."""
    template = DEFAULT_TEMPLATES[("term-extraction", client.config.language)]
    response = client.complete(template, query.original_text)
    if response.cached:
        return list(response.parsed_terms)
    terms = parse_term_list(response.raw_text)
    return terms if terms is not None else []


def reformulate(query: QueryRecord, client: LlmClient) -> str:
    """Legal-style rewrite of the query; verbatim LLM prose, "" when empty."""
    template = DEFAULT_TEMPLATES[("reformulation", client.config.language)]
    response = client.complete(template, query.original_text)
    return response.raw_text


def term_expand_concat(query: QueryRecord) -> str:
    return expand_text(query.original_text, query.terms)
