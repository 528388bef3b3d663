"""Pooling, judgment matrices, inter-rater agreement and precision.

The assessment unit is a pool: the union of the top-n documents of each
service arm, deduplicated, shuffled so assessors cannot tell which service
returned a document. Binary judgments collected on a pool feed Fleiss'
Kappa, thresholded mean overlap, per-service precision and the pairwise
intersection analysis of the relevant sets.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .index import RankedList, SERVICE_LABELS

RELEVANT = "relevant"
NOT_RELEVANT = "not_relevant"

DEFAULT_KAPPA_THRESHOLD = 0.40
DEFAULT_OVERLAP_THRESHOLD = 0.35


class IncompleteMatrixError(ValueError):
    """Matrix has missing cells; reduce it with complete_submatrix first."""


@dataclass(frozen=True)
class PoolEntry:
    doc_id: str
    services: frozenset[str]
    position: int


@dataclass(frozen=True)
class Pool:
    """Deduplicated union of service results, in presentation order."""

    topic_id: int
    entries: tuple[PoolEntry, ...]

    def doc_ids(self) -> list[str]:
        return [e.doc_id for e in self.entries]

    def credited_to(self, service: str) -> set[str]:
        return {e.doc_id for e in self.entries if service in e.services}

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Judgment:
    assessor_id: str
    topic_id: int
    doc_id: str
    label: str
    timestamp: float = 0.0


@dataclass
class JudgmentMatrix:
    """Documents x raters table of binary labels; None marks a missing cell."""

    topic_id: int
    doc_ids: tuple[str, ...]
    raters: tuple[str, ...]
    cells: dict[tuple[str, str], str] = field(default_factory=dict)

    def label(self, doc_id: str, rater: str) -> str | None:
        return self.cells.get((doc_id, rater))

    def is_complete(self) -> bool:
        return all(
            (d, r) in self.cells for d in self.doc_ids for r in self.raters
        )

    def category_counts(self, doc_id: str) -> tuple[int, int]:
        """(relevant, not_relevant) rating counts for one document."""
        rel = sum(1 for r in self.raters if self.cells.get((doc_id, r)) == RELEVANT)
        not_rel = sum(
            1 for r in self.raters if self.cells.get((doc_id, r)) == NOT_RELEVANT
        )
        return rel, not_rel


@dataclass
class TopicMetrics:
    """Per-topic row of the evaluation report."""

    topic_id: int
    fleiss_kappa: float | None
    kappa_band: str | None
    overlap_080: float
    overlap_100: float
    precision: dict[str, float | None]
    judgment_counts: dict[str, tuple[int, int]]  # service -> (relevant, not_relevant)
    raters: int | None = None
    pool_size: int | None = None


def build_pool(runs: Iterable[RankedList], depth: int = 10, seed: int = 0) -> Pool:
    """Union the top-`depth` documents of each run into a shuffled pool.

    Contributing services are recorded per document but never shown to
    assessors. The presentation order is a seeded shuffle, deterministic
    for a fixed seed.
    """
    runs = list(runs)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not runs:
        raise ValueError("at least one run required")
    topic_ids = {run.topic_id for run in runs}
    if len(topic_ids) != 1:
        raise ValueError(f"runs have mismatched topic ids: {sorted(map(str, topic_ids))}")
    (topic_id,) = topic_ids

    services: dict[str, set[str]] = {}
    for run in runs:
        for doc_id in run.top(depth):
            services.setdefault(doc_id, set()).add(run.service_label)

    order = sorted(services)
    random.Random(seed).shuffle(order)
    entries = tuple(
        PoolEntry(doc_id, frozenset(services[doc_id]), pos)
        for pos, doc_id in enumerate(order)
    )
    return Pool(topic_id, entries)


def _require_complete(matrix: JudgmentMatrix) -> None:
    if not matrix.is_complete():
        raise IncompleteMatrixError(
            f"topic {matrix.topic_id}: matrix has missing cells; "
            "use complete_submatrix to reduce it first"
        )


def fleiss_kappa(matrix: JudgmentMatrix) -> float | None:
    """Chance-corrected agreement over a complete binary judgment matrix.

    Observed agreement is the mean over subjects of the fraction of
    agreeing rater pairs; expected agreement is the sum of squared label
    proportions. Returns None when expected agreement is 1 (every rating
    in one category), where the statistic is undefined.
    """
    _require_complete(matrix)
    n = len(matrix.raters)
    n_subjects = len(matrix.doc_ids)
    if n < 2:
        raise ValueError(f"need at least 2 raters, got {n}")
    if n_subjects < 2:
        raise ValueError(f"need at least 2 subjects, got {n_subjects}")

    p_observed = 0.0
    totals = [0, 0]
    for doc_id in matrix.doc_ids:
        counts = matrix.category_counts(doc_id)
        p_observed += sum(c * (c - 1) for c in counts) / (n * (n - 1))
        totals[0] += counts[0]
        totals[1] += counts[1]
    p_observed /= n_subjects

    p_expected = sum((t / (n_subjects * n)) ** 2 for t in totals)
    if p_expected == 1.0:
        return None
    return (p_observed - p_expected) / (1.0 - p_expected)


def interpret_kappa(kappa: float) -> str:
    """Agreement band for a kappa value (Landis/Koch intervals)."""
    if not math.isfinite(kappa):
        raise ValueError(f"kappa must be finite, got {kappa!r}")
    if kappa < 0:
        return "poor"
    if kappa < 0.2:
        return "slight"
    if kappa < 0.4:
        return "fair"
    if kappa < 0.6:
        return "moderate"
    if kappa < 0.8:
        return "substantial"
    return "almost perfect"


class Overlap(NamedTuple):
    value: float
    vacuous: bool  # True when both sets were empty


def pairwise_overlap(rel_a: set, rel_b: set) -> Overlap:
    """Intersection over union of two relevant sets.

    Two empty sets agree vacuously: value 1.0 with the vacuous flag set.
    """
    union = rel_a | rel_b
    if not union:
        return Overlap(1.0, True)
    return Overlap(len(rel_a & rel_b) / len(union), False)


def thresholded_mean_overlap(matrix: JudgmentMatrix, t: float) -> float:
    """Fraction of documents where at least t of the raters agree.

    A document counts as agreed when its majority-label share reaches t;
    with t=1 only unanimous documents count.
    """
    _require_complete(matrix)
    if not 0 < t <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {t}")
    n = len(matrix.raters)
    if n < 1 or not matrix.doc_ids:
        raise ValueError("matrix must have raters and subjects")
    agreed = sum(
        1
        for doc_id in matrix.doc_ids
        if max(matrix.category_counts(doc_id)) / n >= t
    )
    return agreed / len(matrix.doc_ids)


def _latest_judgments(judgments: Iterable[Judgment]) -> dict[tuple[str, str], Judgment]:
    """(assessor, doc) -> judgment, resubmissions overwriting earlier ones."""
    latest: dict[tuple[str, str], Judgment] = {}
    for j in judgments:
        key = (j.assessor_id, j.doc_id)
        if key not in latest or j.timestamp >= latest[key].timestamp:
            latest[key] = j
    return latest


def complete_submatrix(judgments: Iterable[Judgment], topic_id: int) -> JudgmentMatrix:
    """Reduce a topic's judgments to a complete matrix by dropping raters.

    Raters are dropped in increasing order of judgment count (ties by
    assessor_id) until every remaining document carries a judgment from
    every remaining rater. Documents judged by nobody simply vanish with
    the union.
    """
    topic_judgments = [j for j in judgments if j.topic_id == topic_id]
    latest = _latest_judgments(topic_judgments)

    by_rater: dict[str, dict[str, str]] = {}
    for (assessor_id, doc_id), j in latest.items():
        by_rater.setdefault(assessor_id, {})[doc_id] = j.label

    drop_order = sorted(by_rater, key=lambda r: (len(by_rater[r]), r))
    for dropped in range(len(drop_order)):
        kept = drop_order[dropped:]
        if len(kept) < 2:
            break
        doc_union: set[str] = set()
        for r in kept:
            doc_union.update(by_rater[r])
        if all(doc_id in by_rater[r] for r in kept for doc_id in doc_union):
            raters = tuple(sorted(kept))
            doc_ids = tuple(sorted(doc_union))
            cells = {
                (doc_id, r): by_rater[r][doc_id] for r in raters for doc_id in doc_ids
            }
            return JudgmentMatrix(topic_id, doc_ids, raters, cells)
    raise ValueError(f"topic {topic_id}: insufficient raters for a complete matrix")


def precision(judgments: Iterable[Judgment], service: str, pool: Pool) -> float | None:
    """Relevant share of all judgments on documents credited to a service.

    A pooled duplicate counts for every service that returned it. Returns
    None when the service has no judged documents.
    """
    credited = pool.credited_to(service)
    latest = _latest_judgments(j for j in judgments if j.topic_id == pool.topic_id)
    relevant = total = 0
    for j in latest.values():
        if j.doc_id in credited:
            total += 1
            relevant += j.label == RELEVANT
    if total == 0:
        return None
    return relevant / total


def service_judgment_counts(judgments: Iterable[Judgment], service: str,
                            pool: Pool) -> tuple[int, int]:
    """(relevant, not_relevant) judgment totals credited to a service."""
    credited = pool.credited_to(service)
    latest = _latest_judgments(j for j in judgments if j.topic_id == pool.topic_id)
    rel = sum(1 for j in latest.values() if j.doc_id in credited and j.label == RELEVANT)
    not_rel = sum(
        1 for j in latest.values() if j.doc_id in credited and j.label == NOT_RELEVANT
    )
    return rel, not_rel


def filtered_average_precision(metrics: Iterable[TopicMetrics], mode: str = "none",
                               kappa_threshold: float = DEFAULT_KAPPA_THRESHOLD,
                               overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD,
                               ) -> dict[str, float]:
    """Mean per-service precision over the topics passing an agreement filter.

    mode 'kappa' keeps topics with kappa >= kappa_threshold; mode 'overlap'
    keeps topics whose unanimous-agreement overlap reaches overlap_threshold;
    mode 'none' keeps everything.
    """
    metrics = list(metrics)
    if mode == "none":
        passing = metrics
    elif mode == "kappa":
        passing = [
            m for m in metrics
            if m.fleiss_kappa is not None and m.fleiss_kappa >= kappa_threshold
        ]
    elif mode == "overlap":
        passing = [m for m in metrics if m.overlap_100 >= overlap_threshold]
    else:
        raise ValueError(f"unknown filter mode {mode!r}")
    if not passing:
        raise ValueError(f"empty topic set after filtering (mode={mode!r})")

    averages: dict[str, float] = {}
    for service in SERVICE_LABELS:
        values = [
            m.precision[service]
            for m in passing
            if m.precision.get(service) is not None
        ]
        if values:
            averages[service] = sum(values) / len(values)
    return averages


def relevant_set(matrix: JudgmentMatrix, service: str, pool: Pool) -> set[str]:
    """Documents credited to a service judged relevant by strict majority.

    Ties count as not relevant.
    """
    _require_complete(matrix)
    credited = pool.credited_to(service)
    out = set()
    for doc_id in matrix.doc_ids:
        if doc_id not in credited:
            continue
        rel, not_rel = matrix.category_counts(doc_id)
        if rel > not_rel:
            out.add(doc_id)
    return out


@dataclass
class IntersectionMatrix:
    """Pairwise intersection sizes of per-service relevant sets, summed
    over topics."""

    services: tuple[str, ...]
    pairs: dict[tuple[str, str], int]
    total: int


def intersection_matrix(relevant_sets: Mapping[tuple[int, str], set[str]]) -> IntersectionMatrix:
    """Sum |rel_s1 ∩ rel_s2| over topics for every unordered service pair."""
    services = sorted(
        {service for (_, service) in relevant_sets},
        key=lambda s: (SERVICE_LABELS.index(s) if s in SERVICE_LABELS else 99, s),
    )
    topics = sorted({topic for (topic, _) in relevant_sets})
    pairs: dict[tuple[str, str], int] = {}
    for i, s1 in enumerate(services):
        for s2 in services[i + 1:]:
            pairs[(s1, s2)] = sum(
                len(
                    relevant_sets.get((t, s1), set())
                    & relevant_sets.get((t, s2), set())
                )
                for t in topics
            )
    return IntersectionMatrix(tuple(services), pairs, sum(pairs.values()))
