"""Bundled reference study data.

Ships the agreement and judgment-count tables of a ten-topic assessment
campaign (CLEF ad-hoc topics, four service arms, binary judgments by
student assessors) so agreement-filtered precision reports can be
reproduced without re-running the study.
"""

from __future__ import annotations

import json
from importlib import resources

from .corpus import Topic
from .evalkit import TopicMetrics, interpret_kappa
from .index import SERVICE_LABELS


def _load_json(name: str):
    ref = resources.files("irbench").joinpath("data", name)
    with ref.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def reference_topics() -> list[Topic]:
    return [
        Topic(int(obj["id"]), obj["title"], obj["description"])
        for obj in _load_json("topics.json")
    ]


def reference_agreement() -> dict[int, dict]:
    """Per-topic rater count, pool size, kappa and mean-overlap values."""
    return {int(k): v for k, v in _load_json("agreement.json").items()}


def reference_judgment_counts() -> dict[int, dict[str, tuple[int, int]]]:
    """Per-topic, per-service (relevant, not_relevant) judgment totals."""
    raw = _load_json("judgment_counts.json")
    return {
        int(topic): {
            service: (counts["relevant"], counts["not_relevant"])
            for service, counts in services.items()
        }
        for topic, services in raw.items()
    }


def reference_topic_metrics() -> list[TopicMetrics]:
    """TopicMetrics rows assembled from the bundled reference tables.

    Precision is recomputed from the judgment counts rather than read from
    anywhere, so downstream averaging works on exact values.
    """
    agreement = reference_agreement()
    counts = reference_judgment_counts()
    metrics = []
    for topic_id in sorted(agreement):
        kappa = agreement[topic_id]["kappa"]
        per_service = counts[topic_id]
        metrics.append(
            TopicMetrics(
                topic_id=topic_id,
                fleiss_kappa=kappa,
                kappa_band=interpret_kappa(kappa),
                overlap_080=agreement[topic_id]["overlap_080"],
                overlap_100=agreement[topic_id]["overlap_100"],
                precision={
                    s: per_service[s][0] / sum(per_service[s]) for s in SERVICE_LABELS
                },
                judgment_counts={s: per_service[s] for s in SERVICE_LABELS},
                raters=agreement[topic_id]["raters"],
                pool_size=agreement[topic_id]["pool_size"],
            )
        )
    return metrics
