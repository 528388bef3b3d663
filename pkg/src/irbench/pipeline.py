"""End-to-end campaign pipeline.

Per topic: baseline search, query expansion search, the two re-rankings,
pooling, judging (scripted assessors or an ingested judgment file), then
agreement and precision metrics. Deterministic for a fixed seed, including
the pool presentation order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Topic, load_corpus, load_topics
from .evalkit import (
    DEFAULT_KAPPA_THRESHOLD,
    DEFAULT_OVERLAP_THRESHOLD,
    IntersectionMatrix,
    Judgment,
    Pool,
    TopicMetrics,
    build_pool,
    complete_submatrix,
    filtered_average_precision,
    fleiss_kappa,
    intersection_matrix,
    interpret_kappa,
    precision,
    relevant_set,
    service_judgment_counts,
    thresholded_mean_overlap,
)
from .formats import load_judgments, save_judgments, save_pools, save_runs
from .index import SERVICE_LABELS, SOLR, STR, RankedList, build_index, search
from .query import expand_query, parse_query
from .recommender import recommend_terms, train_model
from .rerank import author_centrality_rerank, bradfordize
from .synthetic import ScriptedAssessor, scripted_judgments


class PipelineError(RuntimeError):
    """A module error, annotated with the topic being processed."""


@dataclass
class CampaignConfig:
    corpus_path: Path
    topics_path: Path
    queries: dict[int, str]
    relevance_terms: dict[int, list[str]] = field(default_factory=dict)
    assessors: list[ScriptedAssessor] = field(default_factory=list)
    judgments_path: Path | None = None
    depth: int = 10
    expansion_n: int = 4
    rerank_limit: int = 1000
    seed: int = 7
    kappa_threshold: float = DEFAULT_KAPPA_THRESHOLD
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        for name in ("kappa_threshold", "overlap_threshold"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must be in [0, 1], got {value}")


def load_config(path) -> CampaignConfig:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    base = path.parent

    def resolve(name):
        return (base / raw[name]) if name in raw and raw[name] else None

    assessors = [
        ScriptedAssessor(
            assessor_id=a["id"],
            topic_id=int(a["topic_id"]),
            error_rate=float(a.get("error_rate", 0.1)),
            coverage=float(a.get("coverage", 1.0)),
        )
        for a in raw.get("assessors", [])
    ]
    return CampaignConfig(
        corpus_path=resolve("corpus"),
        topics_path=resolve("topics"),
        queries={int(k): v for k, v in raw["queries"].items()},
        relevance_terms={int(k): v for k, v in raw.get("relevance_terms", {}).items()},
        assessors=assessors,
        judgments_path=resolve("judgments"),
        depth=int(raw.get("depth", 10)),
        expansion_n=int(raw.get("expansion_n", 4)),
        rerank_limit=int(raw.get("rerank_limit", 1000)),
        seed=int(raw.get("seed", 7)),
        kappa_threshold=float(raw.get("kappa_threshold", DEFAULT_KAPPA_THRESHOLD)),
        overlap_threshold=float(raw.get("overlap_threshold", DEFAULT_OVERLAP_THRESHOLD)),
    )


@dataclass
class ReportBundle:
    metrics: list[TopicMetrics]
    averages: dict[str, dict[str, float] | None]
    intersections: IntersectionMatrix | None
    pools: dict[int, Pool]
    runs: list[RankedList]
    judgments: list[Judgment]
    expansions: dict[int, list[str]]
    topics: dict[int, Topic]
    kappa_threshold: float = DEFAULT_KAPPA_THRESHOLD
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD


def compute_topic_metrics(topic_id: int, pool: Pool,
                          judgments: list[Judgment]) -> tuple[TopicMetrics, dict[str, set]]:
    """Agreement, precision and per-service relevant sets for one topic."""
    matrix = complete_submatrix(judgments, topic_id)
    kappa = fleiss_kappa(matrix)
    metrics = TopicMetrics(
        topic_id=topic_id,
        fleiss_kappa=kappa,
        kappa_band=interpret_kappa(kappa) if kappa is not None else None,
        overlap_080=thresholded_mean_overlap(matrix, 0.8),
        overlap_100=thresholded_mean_overlap(matrix, 1.0),
        precision={s: precision(judgments, s, pool) for s in SERVICE_LABELS},
        judgment_counts={
            s: service_judgment_counts(judgments, s, pool) for s in SERVICE_LABELS
        },
        raters=len(matrix.raters),
        pool_size=len(pool),
    )
    rel_sets = {s: relevant_set(matrix, s, pool) for s in SERVICE_LABELS}
    return metrics, rel_sets


def run_pipeline(config: CampaignConfig) -> ReportBundle:
    corpus = load_corpus(config.corpus_path)
    topics = {t.topic_id: t for t in load_topics(config.topics_path)}
    corpus_map = {r.doc_id: r for r in corpus}
    idx = build_index(corpus)
    model = train_model(corpus)
    file_judgments = (
        load_judgments(config.judgments_path) if config.judgments_path else []
    )

    all_runs: list[RankedList] = []
    pools: dict[int, Pool] = {}
    all_judgments: list[Judgment] = []
    metrics: list[TopicMetrics] = []
    expansions: dict[int, list[str]] = {}
    relevant_sets: dict[tuple[int, str], set] = {}

    for topic_id in sorted(config.queries):
        if topic_id not in topics:
            raise PipelineError(f"topic {topic_id}: not present in topics file")
        try:
            ast = parse_query(config.queries[topic_id])
            baseline = search(idx, ast, config.rerank_limit, topic_id, SOLR)
            recommended = recommend_terms(model, ast, config.expansion_n)
            expansions[topic_id] = recommended
            expanded = expand_query(ast, recommended)
            str_run = search(idx, expanded, config.rerank_limit, topic_id, STR)
            brad_run = bradfordize(baseline, idx)
            auth_run = author_centrality_rerank(baseline, corpus_map)

            runs = [baseline, str_run, brad_run, auth_run]
            pool = build_pool(runs, depth=config.depth, seed=config.seed + topic_id)

            if config.assessors:
                topic_judgments = scripted_judgments(
                    pool,
                    corpus_map,
                    config.relevance_terms.get(topic_id, []),
                    config.assessors,
                    config.seed,
                )
            else:
                topic_judgments = [j for j in file_judgments if j.topic_id == topic_id]

            topic_metrics, rel_sets = compute_topic_metrics(
                topic_id, pool, topic_judgments
            )
        except (ValueError, KeyError) as exc:
            raise PipelineError(f"topic {topic_id}: {exc}") from exc

        all_runs.extend(runs)
        pools[topic_id] = pool
        all_judgments.extend(topic_judgments)
        metrics.append(topic_metrics)
        for service, rel in rel_sets.items():
            relevant_sets[(topic_id, service)] = rel

    averages: dict[str, dict[str, float] | None] = {}
    for mode in ("none", "kappa", "overlap"):
        try:
            averages[mode] = filtered_average_precision(
                metrics,
                mode=mode,
                kappa_threshold=config.kappa_threshold,
                overlap_threshold=config.overlap_threshold,
            )
        except ValueError:
            averages[mode] = None

    return ReportBundle(
        metrics=metrics,
        averages=averages,
        intersections=intersection_matrix(relevant_sets),
        pools=pools,
        runs=all_runs,
        judgments=all_judgments,
        expansions=expansions,
        topics=topics,
        kappa_threshold=config.kappa_threshold,
        overlap_threshold=config.overlap_threshold,
    )


def evaluate_judgments(pools: dict[int, Pool], judgments: list[Judgment],
                       kappa_threshold: float = DEFAULT_KAPPA_THRESHOLD,
                       overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD,
                       topics: dict[int, Topic] | None = None) -> ReportBundle:
    """Metrics-only bundle for already-collected judgments (no search)."""
    metrics = []
    relevant_sets: dict[tuple[int, str], set] = {}
    for topic_id in sorted(pools):
        topic_judgments = [j for j in judgments if j.topic_id == topic_id]
        try:
            topic_metrics, rel_sets = compute_topic_metrics(
                topic_id, pools[topic_id], topic_judgments
            )
        except ValueError as exc:
            raise PipelineError(f"topic {topic_id}: {exc}") from exc
        metrics.append(topic_metrics)
        for service, rel in rel_sets.items():
            relevant_sets[(topic_id, service)] = rel

    averages: dict[str, dict[str, float] | None] = {}
    for mode in ("none", "kappa", "overlap"):
        try:
            averages[mode] = filtered_average_precision(
                metrics, mode=mode,
                kappa_threshold=kappa_threshold, overlap_threshold=overlap_threshold,
            )
        except ValueError:
            averages[mode] = None

    return ReportBundle(
        metrics=metrics,
        averages=averages,
        intersections=intersection_matrix(relevant_sets),
        pools=pools,
        runs=[],
        judgments=judgments,
        expansions={},
        topics=topics or {},
        kappa_threshold=kappa_threshold,
        overlap_threshold=overlap_threshold,
    )


def write_bundle(bundle: ReportBundle, out_dir) -> None:
    """Write runs, pools, judgments and both report forms into a directory."""
    from .report import bundle_to_dict, render_text

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if bundle.runs:
        save_runs(bundle.runs, out_dir / "runs.tsv")
    save_pools(bundle.pools.values(), out_dir / "pools.json")
    save_judgments(bundle.judgments, out_dir / "judgments.tsv")
    (out_dir / "report.txt").write_text(render_text(bundle), encoding="utf-8")
    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(bundle_to_dict(bundle), fh, indent=1, sort_keys=True)
        fh.write("\n")
