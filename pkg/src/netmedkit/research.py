"""Literature retrieval: one request becomes three targeted queries.

The decomposition contract is strict (exactly three pairwise-distinct
queries, padded or truncated after one re-prompt). Search runs against a
Semantic-Scholar-compatible endpoint or, by default in tests, against
recorded response fixtures on disk.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .errors import BackendUnreachable
from .provider import ChatMessage

PAD_SUFFIXES = ("review", "clinical trial")
SEARCH_FIELDS = "title,year,venue,authors,abstract"


@dataclass
class PaperRecord:
    external_id: str
    title: str
    year: int | None
    venue: str
    authors: list[str]
    abstract_snippet: str
    source_query: int  # index of the query that first returned it

    def to_json(self) -> dict:
        return {"id": self.external_id, "title": self.title, "year": self.year,
                "venue": self.venue, "authors": self.authors,
                "abstract": self.abstract_snippet, "source_query": self.source_query}


@dataclass
class SearchReport:
    question: str
    queries: list[str]
    records: list[PaperRecord]
    per_query_counts: list[int]
    errors: list[str | None] = field(default_factory=lambda: [None, None, None])

    def to_json(self) -> dict:
        return {"question": self.question, "queries": self.queries,
                "records": [r.to_json() for r in self.records],
                "per_query_counts": self.per_query_counts,
                "errors": self.errors}


DECOMPOSE_PROMPT = """\
Turn the literature request into exactly three distinct, more targeted
search queries. Reply with three lines, one query per line, nothing else."""


def decompose_research_query(text: str, provider) -> tuple[list[str], bool]:
    """Three pairwise-distinct query strings; returns (queries, degraded)."""
    if not text:
        raise ValueError("empty research request")
    queries = _ask(text, provider)
    if len(set(queries)) == 3:
        return queries, False
    # one re-prompt, then repair deterministically
    queries = _ask(text, provider,
                   note="Previous reply did not contain three distinct queries.")
    if len(set(queries)) == 3:
        return queries, True
    return _repair(text, queries), True


def _ask(text, provider, note=""):
    user = text if not note else f"{text}\n\n{note}"
    reply = provider.complete([ChatMessage("system", DECOMPOSE_PROMPT),
                               ChatMessage("user", user)])
    return [q.strip() for q in reply.content.splitlines() if q.strip()][:3]


def _repair(text: str, queries: list[str]) -> list[str]:
    out = list(dict.fromkeys(queries))
    for suffix in PAD_SUFFIXES:
        if len(out) >= 3:
            break
        candidate = f"{text} {suffix}"
        if candidate not in out:
            out.append(candidate)
    while len(out) < 3:
        out.append(f"{text} {len(out)}")
    return out[:3]


class RecordedSearchBackend:
    """Replays response JSON files; byte-deterministic, the test default.

    A query maps to <fixture_dir>/<slug>.json holding the API response body.
    """

    def __init__(self, fixture_dir):
        self.fixture_dir = Path(fixture_dir)

    @staticmethod
    def slug(query: str) -> str:
        return "".join(c if c.isalnum() else "_" for c in query.lower())[:80]

    def search(self, query: str, limit: int) -> list[dict]:
        path = self.fixture_dir / f"{self.slug(query)}.json"
        if not path.exists():
            raise BackendUnreachable(f"no recorded response for {query!r}")
        with open(path, encoding="utf-8") as fh:
            return json.load(fh).get("data", [])[:limit]


class HTTPSearchBackend:
    """Live Semantic-Scholar-compatible client (configuration-gated)."""

    def __init__(self, base_url: str | None = None, timeout: float = 30.0):
        self.base_url = (base_url or os.environ.get(
            "CHATD_S2_BASE", "https://api.semanticscholar.org")).rstrip("/")
        self._client = httpx.Client(timeout=timeout)

    def search(self, query: str, limit: int) -> list[dict]:
        url = f"{self.base_url}/graph/v1/paper/search"
        try:
            resp = self._client.get(url, params={"query": query, "limit": limit,
                                                 "fields": SEARCH_FIELDS})
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise BackendUnreachable(f"search failed for {query!r}: {exc}") from exc
        return resp.json().get("data", [])


def search_literature(queries: list[str], backend, limit: int = 10,
                      question: str = "") -> SearchReport:
    """Issue one request per query; merge by external id, earliest query wins.

    Per-query failures become error markers; the call only raises if every
    query fails.
    """
    if len(queries) != 3:
        raise ValueError("search_literature requires exactly three queries")
    merged: dict[str, PaperRecord] = {}
    counts = []
    errors: list[str | None] = []
    for qi, query in enumerate(queries):
        try:
            rows = backend.search(query, limit)
        except BackendUnreachable as exc:
            counts.append(0)
            errors.append(str(exc))
            continue
        errors.append(None)
        counts.append(len(rows))
        for row in rows:
            rec = _parse_row(row, qi)
            if rec.external_id not in merged:
                merged[rec.external_id] = rec
    if all(e is not None for e in errors):
        raise BackendUnreachable("all three literature queries failed")
    records = sorted(merged.values(),
                     key=lambda r: (-(r.year or 0), r.title))
    return SearchReport(question=question, queries=list(queries), records=records,
                        per_query_counts=counts, errors=errors)


def _parse_row(row: dict, query_index: int) -> PaperRecord:
    year = row.get("year")
    if year is not None and not 1800 <= int(year) <= 2100:
        year = None
    authors = [a.get("name", "") for a in row.get("authors", []) if a.get("name")]
    abstract = (row.get("abstract") or "")[:400]
    return PaperRecord(external_id=str(row.get("paperId") or row.get("id")),
                       title=row.get("title", ""), year=year,
                       venue=row.get("venue", ""), authors=authors,
                       abstract_snippet=abstract, source_query=query_index)
