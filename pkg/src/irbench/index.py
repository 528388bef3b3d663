"""Inverted index over title/abstract/keywords with tf-idf ranking.

Scoring for a document d and query q::

    score(d) = coord(q, d) * sum_t sqrt(tf(t, d)) * idf(t)^2 / sqrt(len(d))

summed over the distinct terms of q matched in d, with
``idf(t) = 1 + ln(N / (df(t) + 1))``; ``coord`` is the fraction of top-level
clauses of q matched in d; ``len(d)`` counts all indexed tokens of the
document. The query-normalization constant is omitted since it does not
affect ranking order. Ties are broken by doc_id ascending, which keeps
result lists (and therefore assessment pools) reproducible.
"""

from __future__ import annotations

import bisect
import json
import math
import re
from dataclasses import dataclass, field

from .corpus import DocumentRecord
from .query import And, Or, Phrase, PrefixTerm, QueryAst, Term

# Service arm labels, in report column order.
AUTH = "AUTH"
BRAD = "BRAD"
SOLR = "SOLR"
STR = "STR"
SERVICE_LABELS = (AUTH, BRAD, SOLR, STR)

_WORD_RE = re.compile(r"\w+", re.UNICODE)

INDEX_FORMAT = "irbench-index"
INDEX_VERSION = 1


def tokenize(text: str) -> list[str]:
    """Unicode word split, lowercased."""
    return _WORD_RE.findall(text.lower())


@dataclass(frozen=True)
class RankEntry:
    rank: int
    doc_id: str
    score: float


@dataclass(frozen=True)
class RankedList:
    """Ordered result list produced by one service arm."""

    service_label: str
    topic_id: int | None
    entries: tuple[RankEntry, ...]

    def doc_ids(self) -> list[str]:
        return [e.doc_id for e in self.entries]

    def top(self, depth: int) -> list[str]:
        return [e.doc_id for e in self.entries[: depth]]


def ranked_list(service_label: str, topic_id, scored: list[tuple[str, float]]) -> RankedList:
    """Build a RankedList from (doc_id, score) pairs, assigning ranks 1..n."""
    entries = tuple(
        RankEntry(rank, doc_id, float(score))
        for rank, (doc_id, score) in enumerate(scored, start=1)
    )
    return RankedList(service_label, topic_id, entries)


@dataclass
class InvertedIndex:
    doc_count: int = 0
    # term -> doc_id -> field -> tf
    postings: dict[str, dict[str, dict[str, int]]] = field(default_factory=dict)
    doc_len: dict[str, int] = field(default_factory=dict)
    issn: dict[str, str | None] = field(default_factory=dict)
    authors: dict[str, tuple[str, ...]] = field(default_factory=dict)
    # untokenized keywords, lowercased, for exact phrase matching
    keywords: dict[str, tuple[str, ...]] = field(default_factory=dict)
    title_tokens: dict[str, tuple[str, ...]] = field(default_factory=dict)
    abstract_tokens: dict[str, tuple[str, ...]] = field(default_factory=dict)
    _vocab: list[str] = field(default_factory=list, repr=False)

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def idf(self, df: int) -> float:
        return 1.0 + math.log(self.doc_count / (df + 1)) if self.doc_count else 0.0

    def tf(self, term: str, doc_id: str) -> int:
        return sum(self.postings.get(term, {}).get(doc_id, {}).values())

    def terms_with_prefix(self, prefix: str) -> list[str]:
        lo = bisect.bisect_left(self._vocab, prefix)
        hi = bisect.bisect_left(self._vocab, prefix + "￿")
        return self._vocab[lo:hi]

    def _finish(self) -> None:
        self._vocab = sorted(self.postings)


def build_index(corpus: list[DocumentRecord]) -> InvertedIndex:
    """Index title, abstract and keywords of a validated corpus."""
    idx = InvertedIndex(doc_count=len(corpus))
    for rec in corpus:
        fields = {
            "title": tokenize(rec.title),
            "abstract": tokenize(rec.abstract),
            "keywords": [t for kw in rec.keywords for t in tokenize(kw)],
        }
        for fname, toks in fields.items():
            for tok in toks:
                idx.postings.setdefault(tok, {}).setdefault(rec.doc_id, {})
                idx.postings[tok][rec.doc_id][fname] = (
                    idx.postings[tok][rec.doc_id].get(fname, 0) + 1
                )
        idx.doc_len[rec.doc_id] = sum(len(t) for t in fields.values())
        idx.issn[rec.doc_id] = rec.issn
        idx.authors[rec.doc_id] = rec.authors
        idx.keywords[rec.doc_id] = tuple(kw.lower() for kw in rec.keywords)
        idx.title_tokens[rec.doc_id] = tuple(fields["title"])
        idx.abstract_tokens[rec.doc_id] = tuple(fields["abstract"])
    idx._finish()
    return idx


def _count_runs(seq: tuple[str, ...], pattern: list[str]) -> int:
    if not pattern or len(pattern) > len(seq):
        return 0
    return sum(
        1
        for i in range(len(seq) - len(pattern) + 1)
        if list(seq[i : i + len(pattern)]) == pattern
    )


def _phrase_matches(idx: InvertedIndex, text: str) -> dict[str, int]:
    """doc_id -> occurrence count of a phrase.

    A phrase matches a document if it equals one of its keywords verbatim
    (case-insensitive) or occurs as a contiguous token run in title or
    abstract.
    """
    needle = text.lower().strip()
    toks = tokenize(needle)
    hits: dict[str, int] = {}
    for doc_id in idx.doc_len:
        n = sum(1 for kw in idx.keywords[doc_id] if kw == needle)
        n += _count_runs(idx.title_tokens[doc_id], toks)
        n += _count_runs(idx.abstract_tokens[doc_id], toks)
        if n:
            hits[doc_id] = n
    return hits


def _eval(idx: InvertedIndex, node: QueryAst) -> dict[str, dict]:
    """doc_id -> {term key -> sqrt(tf)*idf^2 contribution} for one node."""
    if isinstance(node, Term):
        docs = idx.postings.get(node.text, {})
        w = idx.idf(len(docs)) ** 2
        return {
            d: {("term", node.text): math.sqrt(sum(tfs.values())) * w}
            for d, tfs in docs.items()
        }
    if isinstance(node, PrefixTerm):
        out: dict[str, dict] = {}
        for term in idx.terms_with_prefix(node.stem):
            for d, contribs in _eval(idx, Term(term)).items():
                out.setdefault(d, {}).update(contribs)
        return out
    if isinstance(node, Phrase):
        hits = _phrase_matches(idx, node.text)
        w = idx.idf(len(hits)) ** 2
        key = ("phrase", node.text.lower())
        return {d: {key: math.sqrt(tf) * w} for d, tf in hits.items()}
    if isinstance(node, And):
        parts = [_eval(idx, child) for child in node.children]
        docs = set(parts[0])
        for p in parts[1:]:
            docs &= set(p)
        out = {}
        for d in docs:
            merged: dict = {}
            for p in parts:
                merged.update(p[d])
            out[d] = merged
        return out
    if isinstance(node, Or):
        out = {}
        for child in node.children:
            for d, contribs in _eval(idx, child).items():
                out.setdefault(d, {}).update(contribs)
        return out
    raise TypeError(f"not a query node: {node!r}")


def search(idx: InvertedIndex, ast: QueryAst, limit: int, topic_id: int | None = None,
           service_label: str = SOLR) -> RankedList:
    """Rank matching documents; boolean AND/OR semantics, tf-idf scoring."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if isinstance(ast, (And, Or)):
        parts = [_eval(idx, child) for child in ast.children]
        total = len(ast.children)
        if isinstance(ast, And):
            docs = set(parts[0])
            for p in parts[1:]:
                docs &= set(p)
        else:
            docs = set()
            for p in parts:
                docs |= set(p)
        merged = {}
        for d in docs:
            contribs: dict = {}
            matched = 0
            for p in parts:
                if d in p:
                    matched += 1
                    contribs.update(p[d])
            merged[d] = (matched / total, contribs)
    else:
        merged = {d: (1.0, contribs) for d, contribs in _eval(idx, ast).items()}

    scored = []
    for d, (coord, contribs) in merged.items():
        norm = 1.0 / math.sqrt(max(idx.doc_len.get(d, 0), 1))
        scored.append((d, coord * sum(contribs.values()) * norm))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return ranked_list(service_label, topic_id, scored[:limit])


def facet_counts(idx: InvertedIndex, docs) -> dict[str, int]:
    """Count documents per ISSN over exactly the given doc set."""
    counts: dict[str, int] = {}
    for doc_id in docs:
        if doc_id not in idx.doc_len:
            raise ValueError(f"unknown doc_id {doc_id!r}")
        issn = idx.issn.get(doc_id)
        if issn:
            counts[issn] = counts.get(issn, 0) + 1
    return counts


def save_index(idx: InvertedIndex, path) -> None:
    payload = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "doc_count": idx.doc_count,
        "postings": idx.postings,
        "doc_len": idx.doc_len,
        "issn": idx.issn,
        "authors": {d: list(a) for d, a in idx.authors.items()},
        "keywords": {d: list(k) for d, k in idx.keywords.items()},
        "title_tokens": {d: list(t) for d, t in idx.title_tokens.items()},
        "abstract_tokens": {d: list(t) for d, t in idx.abstract_tokens.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)


def load_index(path) -> InvertedIndex:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != INDEX_FORMAT:
        raise ValueError(f"not an index file: {path}")
    if payload.get("version") != INDEX_VERSION:
        raise ValueError(f"unsupported index version {payload.get('version')}")
    idx = InvertedIndex(
        doc_count=payload["doc_count"],
        postings=payload["postings"],
        doc_len=payload["doc_len"],
        issn=payload["issn"],
        authors={d: tuple(a) for d, a in payload["authors"].items()},
        keywords={d: tuple(k) for d, k in payload["keywords"].items()},
        title_tokens={d: tuple(t) for d, t in payload["title_tokens"].items()},
        abstract_tokens={d: tuple(t) for d, t in payload["abstract_tokens"].items()},
    )
    idx._finish()
    return idx
