"""Document collection and topic loading.

The corpus file is newline-delimited JSON, one record per line with keys
``id, title, abstract, keywords, authors, issn, journal, year``. Topics are
a JSON array of ``{id, title, description}``. Both loaders validate their
input and fail with line/position information instead of producing partial
collections.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

ISSN_PATTERN = re.compile(r"^\d{4}-\d{3}[\dX]$")


class CorpusError(ValueError):
    """Raised for malformed corpus or topic files."""


@dataclass(frozen=True)
class DocumentRecord:
    """One bibliographic metadata record."""

    doc_id: str
    title: str
    abstract: str
    keywords: tuple[str, ...] = ()
    authors: tuple[str, ...] = ()
    issn: str | None = None
    journal: str | None = None
    year: int = 0


@dataclass(frozen=True)
class Topic:
    """A predefined search task: short title plus information-need text."""

    topic_id: int
    title: str
    description: str


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    vocab_size: int
    field_token_counts: dict[str, int] = field(default_factory=dict)


def _clean_authors(raw, line_no: int) -> tuple[str, ...]:
    # Byte-exact comparison after trimming; duplicates within one record are
    # collapsed to the first occurrence.
    seen = []
    for name in raw:
        name = str(name).strip()
        if not name:
            continue
        if name in seen:
            log.warning("line %d: duplicate author %r dropped", line_no, name)
            continue
        seen.append(name)
    return tuple(seen)


def record_from_dict(obj: dict, line_no: int = 0) -> DocumentRecord:
    """Build and validate one record from its JSON object form."""
    doc_id = str(obj.get("id", "")).strip()
    if not doc_id:
        raise CorpusError(f"line {line_no}: record without id")

    issn = obj.get("issn") or None
    if issn is not None:
        issn = str(issn).strip()
        if not ISSN_PATTERN.match(issn):
            log.warning("line %d: invalid issn %r cleared (want NNNN-NNNC)", line_no, issn)
            issn = None

    year = obj.get("year", 0)
    try:
        year = int(year) if year is not None else 0
    except (TypeError, ValueError):
        raise CorpusError(f"line {line_no}: year {year!r} is not an integer") from None

    return DocumentRecord(
        doc_id=doc_id,
        title=str(obj.get("title", "") or ""),
        abstract=str(obj.get("abstract", "") or ""),
        keywords=tuple(str(k) for k in (obj.get("keywords") or [])),
        authors=_clean_authors(obj.get("authors") or [], line_no),
        issn=issn,
        journal=(str(obj["journal"]) if obj.get("journal") else None),
        year=year,
    )


def record_to_dict(rec: DocumentRecord) -> dict:
    return {
        "id": rec.doc_id,
        "title": rec.title,
        "abstract": rec.abstract,
        "keywords": list(rec.keywords),
        "authors": list(rec.authors),
        "issn": rec.issn,
        "journal": rec.journal,
        "year": rec.year,
    }


def load_corpus(path) -> list[DocumentRecord]:
    """Load a newline-delimited corpus file.

    Duplicate doc_ids are an error naming both offending lines; syntactically
    invalid ISSNs are cleared with a warning rather than rejecting the record.
    """
    records: list[DocumentRecord] = []
    first_line: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid record: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise CorpusError(f"line {line_no}: expected an object, got {type(obj).__name__}")
            rec = record_from_dict(obj, line_no)
            if rec.doc_id in first_line:
                raise CorpusError(
                    f"duplicate doc_id {rec.doc_id!r} on lines "
                    f"{first_line[rec.doc_id]} and {line_no}"
                )
            first_line[rec.doc_id] = line_no
            records.append(rec)
    return records


def save_corpus(records, path) -> None:
    """Inverse of load_corpus; load(save(records)) == records."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), ensure_ascii=False) + "\n")


def load_topics(path) -> list[Topic]:
    with open(path, encoding="utf-8") as fh:
        content = fh.read()
    if not content.strip():
        return []
    try:
        raw = json.loads(content)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"invalid topics file: {exc.msg} (line {exc.lineno})") from None
    if raw == []:
        return []
    if not isinstance(raw, list):
        raise CorpusError("topics file must contain an array")
    topics = []
    seen: set[int] = set()
    for i, obj in enumerate(raw):
        try:
            topic = Topic(int(obj["id"]), str(obj["title"]), str(obj["description"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"topic #{i}: {exc}") from None
        if not topic.title or not topic.description:
            raise CorpusError(f"topic {topic.topic_id}: empty title or description")
        if topic.topic_id in seen:
            raise CorpusError(f"duplicate topic_id {topic.topic_id}")
        seen.add(topic.topic_id)
        topics.append(topic)
    return topics


def corpus_stats(records) -> CorpusStats:
    from .index import tokenize

    vocab: set[str] = set()
    per_field = {"title": 0, "abstract": 0, "keywords": 0}
    for rec in records:
        for fname, text in (
            ("title", rec.title),
            ("abstract", rec.abstract),
            ("keywords", " ".join(rec.keywords)),
        ):
            toks = tokenize(text)
            per_field[fname] += len(toks)
            vocab.update(toks)
    return CorpusStats(len(records), len(vocab), per_field)
