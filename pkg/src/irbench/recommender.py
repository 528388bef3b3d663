"""Search term recommendation from co-word statistics.

Associates free text terms (title/abstract tokens) with controlled
vocabulary terms (the keywords field, taken verbatim) by document-level
co-occurrence. Association strength is the signed log-likelihood ratio of
the 2x2 contingency table for a (free, controlled) pair: positive when the
pair co-occurs more often than independence predicts, negative when less.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .corpus import DocumentRecord
from .index import tokenize
from .query import Phrase, PrefixTerm, QueryAst, Term, query_leaves

MODEL_FORMAT = "irbench-str-model"
MODEL_VERSION = 1


@dataclass
class AssociationModel:
    total_docs: int
    free_counts: dict[str, int] = field(default_factory=dict)
    controlled_counts: dict[str, int] = field(default_factory=dict)
    # free term -> controlled term -> joint doc count (only co-occurring pairs)
    pair_counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def joint(self, free: str, controlled: str) -> int:
        return self.pair_counts.get(free, {}).get(controlled, 0)

    def score(self, free: str, controlled: str) -> float:
        """Signed log-likelihood ratio; 0.0 when either marginal is absent."""
        n_f = self.free_counts.get(free, 0)
        n_c = self.controlled_counts.get(controlled, 0)
        if n_f == 0 or n_c == 0:
            return 0.0
        return _signed_llr(self.joint(free, controlled), n_f, n_c, self.total_docs)

    def free_terms_with_prefix(self, stem: str) -> list[str]:
        return sorted(f for f in self.free_counts if f.startswith(stem))


def _signed_llr(k11: int, n_f: int, n_c: int, n: int) -> float:
    # Contingency table: rows = free term present/absent, cols = controlled
    # term present/absent. Cells with zero count contribute zero.
    cells = (
        (k11, n_f, n_c),
        (n_f - k11, n_f, n - n_c),
        (n_c - k11, n - n_f, n_c),
        (n - n_f - n_c + k11, n - n_f, n - n_c),
    )
    llr = 0.0
    for k, row, col in cells:
        if k > 0:
            llr += k * math.log(k * n / (row * col))
    llr *= 2.0
    sign = 1.0 if k11 * n >= n_f * n_c else -1.0
    return sign * llr


def train_model(corpus: list[DocumentRecord]) -> AssociationModel:
    """Count document-level co-occurrence of free and controlled terms."""
    if not any(rec.keywords for rec in corpus):
        raise ValueError("no controlled vocabulary present")
    model = AssociationModel(total_docs=len(corpus))
    for rec in corpus:
        free = set(tokenize(rec.title)) | set(tokenize(rec.abstract))
        controlled = set(rec.keywords)
        for f in free:
            model.free_counts[f] = model.free_counts.get(f, 0) + 1
        for c in controlled:
            model.controlled_counts[c] = model.controlled_counts.get(c, 0) + 1
        for f in free:
            for c in controlled:
                pairs = model.pair_counts.setdefault(f, {})
                pairs[c] = pairs.get(c, 0) + 1
    return model


def _query_free_terms(model: AssociationModel, ast: QueryAst) -> list[str]:
    terms: list[str] = []
    for leaf in query_leaves(ast):
        if isinstance(leaf, Term):
            candidates = [leaf.text]
        elif isinstance(leaf, PrefixTerm):
            candidates = model.free_terms_with_prefix(leaf.stem)
        elif isinstance(leaf, Phrase):
            candidates = tokenize(leaf.text)
        else:
            candidates = []
        for t in candidates:
            if t in model.free_counts and t not in terms:
                terms.append(t)
    return terms


def recommend_terms(model: AssociationModel, ast: QueryAst, n: int = 4) -> list[str]:
    """Top n controlled terms for a query, by summed association score.

    Prefix leaves expand to every matching free term in the model. Only
    positively associated terms are returned, so fewer than n may come back.
    Ties break lexicographically.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    free_terms = _query_free_terms(model, ast)
    if not free_terms:
        return []
    candidates: set[str] = set()
    for f in free_terms:
        candidates.update(model.pair_counts.get(f, ()))
    totals = {
        c: sum(model.score(f, c) for f in free_terms)
        for c in candidates
    }
    ranked = sorted(totals.items(), key=lambda item: (-item[1], item[0]))
    return [c for c, s in ranked[:n] if s > 0]


def save_model(model: AssociationModel, path) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "total_docs": model.total_docs,
        "free_counts": model.free_counts,
        "controlled_counts": model.controlled_counts,
        "pairs": [
            [f, c, k]
            for f in sorted(model.pair_counts)
            for c, k in sorted(model.pair_counts[f].items())
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)


def load_model(path) -> AssociationModel:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a recommender model file: {path}")
    if payload.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')}")
    model = AssociationModel(
        total_docs=payload["total_docs"],
        free_counts=payload["free_counts"],
        controlled_counts=payload["controlled_counts"],
    )
    for f, c, k in payload["pairs"]:
        model.pair_counts.setdefault(f, {})[c] = k
    return model
