"""Deterministic synthetic campaign: corpus, queries and scripted assessors.

Generates a small topical corpus (ten themes matching the bundled topics,
plus background noise), one boolean query per topic, and scripted assessors
that judge pooled documents against a token-overlap ground truth with a
per-assessor error rate. Everything is a pure function of the seed, so
campaign runs are reproducible byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import DocumentRecord
from .evalkit import Judgment, NOT_RELEVANT, Pool, RELEVANT
from .index import tokenize

GENERAL_WORDS = [
    "study", "report", "analysis", "data", "survey", "society", "culture",
    "economy", "policy", "research", "results", "findings", "discussion",
    "germany", "europe", "development", "social", "public", "change",
    "comparison", "history", "theory", "empirical", "qualitative",
]

GENERAL_KEYWORDS = [
    "social research", "sociology", "survey research", "public opinion",
    "social policy", "historical analysis", "methodology",
]

THEMES: dict[int, dict] = {
    83: {
        "tokens": ["war", "media", "press", "journalist", "conflict", "reporting"],
        "keywords": ["war reporting", "mass media", "press coverage", "war", "journalism"],
        "query": "war AND (media OR press)",
    },
    84: {
        "tokens": ["school", "computer", "internet", "education", "technology", "classroom"],
        "keywords": ["new media", "computer assisted learning", "school education", "internet"],
        "query": "school* AND (computer* OR internet)",
    },
    88: {
        "tokens": ["sports", "nazi", "reich", "propaganda", "olympic", "athletes"],
        "keywords": ["national socialism", "sports policy", "third reich", "propaganda"],
        "query": "sport* AND (nazi OR reich)",
    },
    93: {
        "tokens": ["burnout", "stress", "exhaustion", "work", "syndrome", "occupational"],
        "keywords": ["burnout syndrome", "occupational stress", "mental health", "workload"],
        "query": "burnout OR (stress AND work*)",
    },
    96: {
        "tokens": ["vocational", "training", "apprentice", "cost", "benefit", "qualification"],
        "keywords": ["vocational education", "training costs", "cost benefit analysis", "apprenticeship"],
        "query": "vocational AND (cost* OR benefit*)",
    },
    105: {
        "tokens": ["graduate", "university", "labour", "market", "employment", "career"],
        "keywords": ["university graduates", "labour market", "employment", "career entry"],
        "query": "graduate* AND (labour OR market OR employment)",
    },
    110: {
        "tokens": ["suicide", "youth", "adolescent", "teenager", "risk", "prevention"],
        "keywords": ["suicide", "adolescence", "youth research", "risk behaviour"],
        "query": "suicide* AND (youth* OR teenager* OR adolescen*)",
    },
    153: {
        "tokens": ["childless", "family", "birth", "fertility", "demographic", "parenthood"],
        "keywords": ["childlessness", "fertility", "family planning", "demographic change"],
        "query": "childless* OR (fertility AND family)",
    },
    166: {
        "tokens": ["poverty", "homeless", "welfare", "german", "income", "deprivation"],
        "keywords": ["poverty", "Federal Republic of Germany", "social assistance", "immiseration"],
        "query": "povert* AND german*",
    },
    173: {
        "tokens": ["violence", "youth", "aggression", "delinquent", "adolescent", "offender"],
        "keywords": ["violence", "youth", "aggression", "juvenile delinquency"],
        "query": "violen* AND (youth* OR adolescen*)",
    },
}

SURNAMES = [
    "Fischer", "Weber", "Meyer", "Wagner", "Becker", "Schulz", "Hoffmann",
    "Koch", "Richter", "Klein", "Wolf", "Neumann", "Schwarz", "Braun",
    "Zimmermann", "Krueger", "Hartmann", "Lange", "Werner", "Krause",
]

# Per-theme journal shares: one core journal, a few peripheral ones.
JOURNAL_SHARES = [0.45, 0.25, 0.15, 0.10, 0.05]

DEFAULT_SEED = 7
DOCS_PER_THEME = 38
BACKGROUND_DOCS = 120


@dataclass(frozen=True)
class ScriptedAssessor:
    assessor_id: str
    topic_id: int
    error_rate: float
    coverage: float = 1.0


def _theme_journals(topic_id: int) -> list[str]:
    return [f"{1000 + topic_id:04d}-{j:03d}{j % 10}" for j in range(len(JOURNAL_SHARES))]


def _theme_authors(rng: random.Random, topic_id: int) -> list[str]:
    names = rng.sample(SURNAMES, 8)
    return [f"{name}, {chr(65 + i % 6)}." for i, name in enumerate(names)]


def _pick_journal(rng: random.Random, journals: list[str]) -> str | None:
    if rng.random() < 0.10:
        return None  # some records lack an ISSN
    r = rng.random()
    acc = 0.0
    for issn, share in zip(journals, JOURNAL_SHARES):
        acc += share
        if r <= acc:
            return issn
    return journals[-1]


def _words(rng: random.Random, pool: list[str], k: int) -> list[str]:
    return [rng.choice(pool) for _ in range(k)]


def generate_corpus(seed: int = DEFAULT_SEED) -> list[DocumentRecord]:
    """~500 documents: DOCS_PER_THEME per theme plus background noise."""
    rng = random.Random(seed)
    records = []
    doc_no = 0
    for topic_id in sorted(THEMES):
        theme = THEMES[topic_id]
        journals = _theme_journals(topic_id)
        authors = _theme_authors(rng, topic_id)
        for _ in range(DOCS_PER_THEME):
            # controls how many distinct theme tokens the document carries;
            # docs with fewer than 3 are on-topic only superficially
            distinct = rng.choice([2, 2, 3, 4, 5])
            chosen = rng.sample(theme["tokens"], distinct)
            title = " ".join(
                _words(rng, chosen, rng.randint(2, 4))
                + _words(rng, GENERAL_WORDS, rng.randint(1, 2))
            )
            body = list(chosen) + _words(rng, chosen + GENERAL_WORDS, rng.randint(10, 25))
            rng.shuffle(body)
            abstract = " ".join(body)
            if distinct >= 3:
                keywords = sorted(set(_words(rng, theme["keywords"], rng.randint(1, 3))))
            else:
                keywords = sorted(set(_words(rng, GENERAL_KEYWORDS, rng.randint(0, 1))))
            issn = _pick_journal(rng, journals)
            records.append(
                DocumentRecord(
                    doc_id=f"doc{doc_no:04d}",
                    title=title,
                    abstract=abstract,
                    keywords=tuple(keywords),
                    authors=tuple(sorted(set(rng.sample(authors, rng.randint(1, 3))))),
                    issn=issn,
                    journal=f"Journal {issn}" if issn else None,
                    year=rng.randint(1985, 2009),
                )
            )
            doc_no += 1
    background_journals = [f"{9900 + j:04d}-00{j}X" for j in range(5)]
    background_authors = [f"{name}, Z." for name in SURNAMES]
    for _ in range(BACKGROUND_DOCS):
        issn = _pick_journal(rng, background_journals)
        records.append(
            DocumentRecord(
                doc_id=f"doc{doc_no:04d}",
                title=" ".join(_words(rng, GENERAL_WORDS, rng.randint(3, 6))),
                abstract=" ".join(_words(rng, GENERAL_WORDS, rng.randint(10, 25))),
                keywords=tuple(sorted(set(_words(rng, GENERAL_KEYWORDS, rng.randint(0, 2))))),
                authors=tuple(sorted(set(rng.sample(background_authors, rng.randint(0, 3))))),
                issn=issn,
                journal=f"Journal {issn}" if issn else None,
                year=rng.randint(1985, 2009),
            )
        )
        doc_no += 1
    return records


def demo_queries() -> dict[int, str]:
    return {topic_id: theme["query"] for topic_id, theme in THEMES.items()}


def relevance_terms() -> dict[int, list[str]]:
    return {topic_id: list(theme["tokens"]) for topic_id, theme in THEMES.items()}


def demo_assessors(seed: int = DEFAULT_SEED) -> list[ScriptedAssessor]:
    """Two to six assessors per topic; a few leave the form incomplete."""
    rng = random.Random(seed + 1)
    assessors = []
    for topic_id in sorted(THEMES):
        count = rng.randint(2, 6)
        for i in range(count):
            # the first two assessors always judge everything so a complete
            # submatrix with >= 2 raters exists for every topic
            coverage = 1.0 if i < 2 else rng.choice([1.0, 1.0, 1.0, 0.9])
            assessors.append(
                ScriptedAssessor(
                    assessor_id=f"s{topic_id}_{i:02d}",
                    topic_id=topic_id,
                    error_rate=round(rng.uniform(0.02, 0.22), 2),
                    coverage=coverage,
                )
            )
    return assessors


def ground_truth(record: DocumentRecord, terms: list[str]) -> bool:
    """A document is truly relevant when title+abstract carry >= 3 distinct
    topic terms.

    Prefix comparison, so 'school' also matches 'schools'. Independent of
    the retrieval path: judged docs may well be superficial matches, and
    relevant docs may be retrieval misses.
    """
    doc_tokens = set(tokenize(record.title)) | set(tokenize(record.abstract))
    hits = {t for t in terms if any(tok.startswith(t) for tok in doc_tokens)}
    return len(hits) >= 3


def scripted_judgments(pool: Pool, corpus: dict[str, DocumentRecord],
                       terms: list[str], assessors: list[ScriptedAssessor],
                       seed: int) -> list[Judgment]:
    """Judgments of all scripted assessors for one topic's pool."""
    judgments = []
    for assessor in assessors:
        if assessor.topic_id != pool.topic_id:
            continue
        rng = random.Random(f"{seed}:{assessor.assessor_id}:{pool.topic_id}")
        limit = max(1, round(assessor.coverage * len(pool)))
        for position, doc_id in enumerate(pool.doc_ids()):
            if position >= limit:
                break
            truth = ground_truth(corpus[doc_id], terms)
            flip = rng.random() < assessor.error_rate
            label = RELEVANT if truth != flip else NOT_RELEVANT
            judgments.append(
                Judgment(
                    assessor_id=assessor.assessor_id,
                    topic_id=pool.topic_id,
                    doc_id=doc_id,
                    label=label,
                    timestamp=float(position),
                )
            )
    return judgments
