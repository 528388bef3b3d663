import random

import pytest

from irbench.corpus import DocumentRecord


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\nACCEPTANCE {status}: {name}")

WORDS = [
    "war", "media", "press", "school", "computer", "internet", "sports",
    "burnout", "stress", "education", "cost", "graduate", "labour", "market",
    "suicide", "youth", "family", "poverty", "homeless", "violence", "study",
    "report", "analysis", "german", "social", "data", "survey", "policy",
]

AUTHORS = [f"Author {c}" for c in "ABCDEFGHIJKLMNOP"]

ISSNS = [f"{1000 + i:04d}-000{i % 10}" for i in range(8)]


def make_doc(rng: random.Random, i: int, issn_rate: float = 0.8) -> DocumentRecord:
    title = " ".join(rng.choices(WORDS, k=rng.randint(2, 6)))
    abstract = " ".join(rng.choices(WORDS, k=rng.randint(5, 30)))
    keywords = tuple(sorted(set(rng.choices(WORDS, k=rng.randint(0, 3)))))
    authors = tuple(sorted(set(rng.choices(AUTHORS, k=rng.randint(0, 4)))))
    issn = rng.choice(ISSNS) if rng.random() < issn_rate else None
    return DocumentRecord(
        doc_id=f"d{i:04d}",
        title=title,
        abstract=abstract,
        keywords=keywords,
        authors=authors,
        issn=issn,
        journal=f"Journal {issn}" if issn else None,
        year=1990 + (i % 30),
    )


def make_corpus(seed: int, size: int, issn_rate: float = 0.8) -> list[DocumentRecord]:
    rng = random.Random(seed)
    return [make_doc(rng, i, issn_rate) for i in range(size)]


@pytest.fixture
def small_corpus():
    return make_corpus(seed=1, size=40)
