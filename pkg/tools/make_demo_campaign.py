#!/usr/bin/env python3
"""Regenerate the bundled demo campaign files under src/irbench/data/.

Run after changing irbench.synthetic so the shipped corpus and campaign
config stay in sync with the generator.
"""

import json
from pathlib import Path

from irbench.corpus import save_corpus
from irbench.synthetic import (
    DEFAULT_SEED,
    demo_assessors,
    demo_queries,
    generate_corpus,
    relevance_terms,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "irbench" / "data"


def main():
    save_corpus(generate_corpus(DEFAULT_SEED), DATA_DIR / "demo_corpus.jsonl")
    campaign = {
        "corpus": "corpus.jsonl",
        "topics": "topics.json",
        "seed": DEFAULT_SEED,
        "depth": 10,
        "expansion_n": 4,
        "rerank_limit": 1000,
        "kappa_threshold": 0.40,
        "overlap_threshold": 0.35,
        "queries": {str(k): v for k, v in sorted(demo_queries().items())},
        "relevance_terms": {str(k): v for k, v in sorted(relevance_terms().items())},
        "assessors": [
            {
                "id": a.assessor_id,
                "topic_id": a.topic_id,
                "error_rate": a.error_rate,
                "coverage": a.coverage,
            }
            for a in demo_assessors(DEFAULT_SEED)
        ],
    }
    with open(DATA_DIR / "demo_campaign.json", "w", encoding="utf-8") as fh:
        json.dump(campaign, fh, indent=1)
        fh.write("\n")
    print(f"wrote {DATA_DIR / 'demo_corpus.jsonl'}")
    print(f"wrote {DATA_DIR / 'demo_campaign.json'}")


if __name__ == "__main__":
    main()
