"""Report rendering: aligned text tables and a machine-readable dict."""

from __future__ import annotations

from .evalkit import filtered_average_precision
from .fixtures import reference_topic_metrics
from .index import SERVICE_LABELS
from .pipeline import ReportBundle


def _fmt(value, width=6, digits=2):
    if value is None:
        return "-".rjust(width)
    return f"{value:.{digits}f}".rjust(width)


def _service_header() -> str:
    return "".join(f"{s:>7}" for s in SERVICE_LABELS)


def render_text(bundle: ReportBundle) -> str:
    lines = []
    add = lines.append

    add("Agreement per topic")
    add("-" * 66)
    add(f"{'topic':>5}  {'raters':>6}  {'pool':>5}  {'kappa':>6}  {'band':<14}"
        f"  {'ovl>=0.8':>8}  {'ovl=1':>6}")
    for m in bundle.metrics:
        add(
            f"{m.topic_id:>5}  {m.raters if m.raters is not None else '-':>6}  "
            f"{m.pool_size if m.pool_size is not None else '-':>5}  "
            f"{_fmt(m.fleiss_kappa, 6, 3)}  {(m.kappa_band or '-'):<14}"
            f"  {_fmt(m.overlap_080, 8, 3)}  {_fmt(m.overlap_100, 6, 3)}"
        )
    kappas = [m.fleiss_kappa for m in bundle.metrics if m.fleiss_kappa is not None]
    if kappas:
        add(
            f"{'avg.':>5}  {'':>6}  {'':>5}  {_fmt(sum(kappas) / len(kappas), 6, 3)}"
            f"  {'':<14}"
            f"  {_fmt(sum(m.overlap_080 for m in bundle.metrics) / len(bundle.metrics), 8, 3)}"
            f"  {_fmt(sum(m.overlap_100 for m in bundle.metrics) / len(bundle.metrics), 6, 3)}"
        )
    add("")

    add("Judgments and precision per topic")
    add("-" * 95)
    add(f"{'':>5}  {'relevant':^28}  {'not relevant':^28}  {'precision':^28}")
    add(f"{'topic':>5}  {_service_header()}  {_service_header()}  {_service_header()}")
    for m in bundle.metrics:
        row = f"{m.topic_id:>5}"
        row += "  " + "".join(
            f"{m.judgment_counts.get(s, (0, 0))[0]:>7}" for s in SERVICE_LABELS
        )
        row += "  " + "".join(
            f"{m.judgment_counts.get(s, (0, 0))[1]:>7}" for s in SERVICE_LABELS
        )
        row += "  " + "".join(_fmt(m.precision.get(s), 7) for s in SERVICE_LABELS)
        add(row)
    for mode, label in (
        ("none", "avg."),
        ("kappa", f"avg. (kappa >= {bundle.kappa_threshold:.2f})"),
        ("overlap", f"avg. (overlap >= {bundle.overlap_threshold:.2f})"),
    ):
        averages = bundle.averages.get(mode)
        row = f"{label:<67}"
        if averages is None:
            row += "(no topic passed the filter)"
        else:
            row += "".join(_fmt(averages.get(s), 7) for s in SERVICE_LABELS)
        add(row)
    add("")

    if bundle.expansions:
        add("Query expansion terms")
        add("-" * 66)
        for topic_id in sorted(bundle.expansions):
            terms = ", ".join(bundle.expansions[topic_id]) or "(none)"
            add(f"{topic_id:>5}  {terms}")
        add("")

    if bundle.intersections is not None:
        inter = bundle.intersections
        add("Pairwise intersections of relevant top documents")
        add("-" * 66)
        for (s1, s2) in sorted(inter.pairs):
            add(f"{s1} & {s2}: {inter.pairs[(s1, s2)]}")
        add(f"total: {inter.total}")
        add("")
    return "\n".join(lines) + "\n"


def bundle_to_dict(bundle: ReportBundle) -> dict:
    topics_block = []
    for m in bundle.metrics:
        topic = bundle.topics.get(m.topic_id)
        topics_block.append(
            {
                "topic_id": m.topic_id,
                "title": topic.title if topic else None,
                "raters": m.raters,
                "pool_size": m.pool_size,
                "kappa": m.fleiss_kappa,
                "kappa_band": m.kappa_band,
                "overlap_080": m.overlap_080,
                "overlap_100": m.overlap_100,
                "precision": m.precision,
                "judgment_counts": {
                    s: {"relevant": c[0], "not_relevant": c[1]}
                    for s, c in m.judgment_counts.items()
                },
                "expansion_terms": bundle.expansions.get(m.topic_id),
            }
        )
    intersections = None
    if bundle.intersections is not None:
        intersections = {
            "pairs": {
                f"{s1}&{s2}": count
                for (s1, s2), count in sorted(bundle.intersections.pairs.items())
            },
            "total": bundle.intersections.total,
        }
    return {
        "topics": topics_block,
        "averages": bundle.averages,
        "intersections": intersections,
        "kappa_threshold": bundle.kappa_threshold,
        "overlap_threshold": bundle.overlap_threshold,
    }


def bundle_from_dict(payload: dict) -> ReportBundle:
    """Rebuild a renderable bundle from a report.json payload."""
    from .evalkit import IntersectionMatrix, TopicMetrics

    metrics = []
    expansions = {}
    for block in payload["topics"]:
        metrics.append(
            TopicMetrics(
                topic_id=block["topic_id"],
                fleiss_kappa=block["kappa"],
                kappa_band=block["kappa_band"],
                overlap_080=block["overlap_080"],
                overlap_100=block["overlap_100"],
                precision=block["precision"],
                judgment_counts={
                    s: (c["relevant"], c["not_relevant"])
                    for s, c in block["judgment_counts"].items()
                },
                raters=block.get("raters"),
                pool_size=block.get("pool_size"),
            )
        )
        if block.get("expansion_terms") is not None:
            expansions[block["topic_id"]] = block["expansion_terms"]
    intersections = None
    if payload.get("intersections"):
        pairs = {
            tuple(key.split("&")): count
            for key, count in payload["intersections"]["pairs"].items()
        }
        services = tuple(sorted({s for pair in pairs for s in pair}))
        intersections = IntersectionMatrix(
            services, pairs, payload["intersections"]["total"]
        )
    return ReportBundle(
        metrics=metrics,
        averages=payload["averages"],
        intersections=intersections,
        pools={},
        runs=[],
        judgments=[],
        expansions=expansions,
        topics={},
        kappa_threshold=payload.get("kappa_threshold", 0.40),
        overlap_threshold=payload.get("overlap_threshold", 0.35),
    )


def reference_bundle(kappa_threshold: float = 0.40,
                     overlap_threshold: float = 0.35) -> ReportBundle:
    """Bundle assembled from the shipped reference study tables."""
    metrics = reference_topic_metrics()
    averages = {}
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
        intersections=None,
        pools={},
        runs=[],
        judgments=[],
        expansions={},
        topics={},
        kappa_threshold=kappa_threshold,
        overlap_threshold=overlap_threshold,
    )
