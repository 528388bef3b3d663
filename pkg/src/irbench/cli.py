"""Command line entry point.

Subcommands expose the pipeline stages with file-based I/O::

    ingest     validate a corpus / topics file
    index      build and persist the inverted index
    train-str  train the term recommendation model
    search     run a boolean query against an index
    rerank     re-rank a run file (brad | auth)
    pool       build assessment pools from a run file
    serve      start the assessment HTTP backend
    evaluate   compute agreement/precision metrics from judgments
    report     render reports (reference tables or a report.json)
    pipeline   run the whole campaign end to end
    demo       write the bundled synthetic campaign to a directory

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .corpus import CorpusError, DocumentRecord, load_corpus, load_topics, save_corpus
from .evalkit import build_pool
from .formats import (
    FormatError,
    load_judgments,
    load_pools,
    load_runs,
    save_pools,
    save_runs,
    write_runs,
)
from .index import SOLR, build_index, load_index, save_index, search
from .pipeline import (
    PipelineError,
    evaluate_judgments,
    load_config,
    run_pipeline,
    write_bundle,
)
from .query import QuerySyntaxError, expand_query, parse_query
from .recommender import load_model, recommend_terms, save_model, train_model
from .rerank import author_centrality_rerank, bradfordize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _ArgumentParser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default would be 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _data_file(name: str):
    return resources.files("irbench").joinpath("data", name)


def cmd_ingest(args) -> int:
    records = load_corpus(args.corpus)
    print(f"{len(records)} records loaded from {args.corpus}")
    if args.topics:
        topics = load_topics(args.topics)
        print(f"{len(topics)} topics loaded from {args.topics}")
    if args.out:
        save_corpus(records, args.out)
        print(f"normalized corpus written to {args.out}")
    return EXIT_OK


def cmd_index(args) -> int:
    records = load_corpus(args.corpus)
    idx = build_index(records)
    save_index(idx, args.out)
    print(f"indexed {idx.doc_count} documents, {len(idx.postings)} terms -> {args.out}")
    return EXIT_OK


def cmd_train_str(args) -> int:
    records = load_corpus(args.corpus)
    model = train_model(records)
    save_model(model, args.out)
    print(
        f"trained on {model.total_docs} documents: {len(model.free_counts)} free terms, "
        f"{len(model.controlled_counts)} controlled terms -> {args.out}"
    )
    return EXIT_OK


def cmd_search(args) -> int:
    idx = load_index(args.index)
    ast = parse_query(args.query)
    label = args.label
    if args.model:
        model = load_model(args.model)
        terms = recommend_terms(model, ast, args.expansion_n)
        print(f"expansion terms: {', '.join(terms) or '(none)'}", file=sys.stderr)
        ast = expand_query(ast, terms)
        label = args.label if args.label != SOLR else "STR"
    result = search(idx, ast, limit=args.limit, topic_id=args.topic, service_label=label)
    if args.out:
        save_runs([result], args.out)
    else:
        write_runs([result], sys.stdout)
    return EXIT_OK


def cmd_rerank(args) -> int:
    idx = load_index(args.index)
    runs = load_runs(args.run)
    out_runs = []
    for run in runs:
        if args.service == "brad":
            out_runs.append(bradfordize(run, idx, keep_unidentified=args.keep_unidentified))
        else:
            # author lists are stored in the index, so no corpus file is needed
            corpus = {
                doc_id: DocumentRecord(doc_id, "", "", authors=authors)
                for doc_id, authors in idx.authors.items()
            }
            out_runs.append(author_centrality_rerank(run, corpus))
    if args.out:
        save_runs(out_runs, args.out)
    else:
        write_runs(out_runs, sys.stdout)
    return EXIT_OK


def cmd_pool(args) -> int:
    runs = load_runs(args.runs)
    by_topic: dict[int, list] = {}
    for run in runs:
        by_topic.setdefault(run.topic_id, []).append(run)
    pools = [
        build_pool(topic_runs, depth=args.depth, seed=args.seed + topic_id)
        for topic_id, topic_runs in sorted(by_topic.items())
    ]
    save_pools(pools, args.out)
    sizes = ", ".join(f"{p.topic_id}:{len(p)}" for p in pools)
    print(f"built {len(pools)} pools ({sizes}) -> {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_campaign

    campaign = load_campaign(args.campaign)
    app = create_app(campaign, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .report import bundle_to_dict, render_text

    pools = load_pools(args.pools)
    judgments = load_judgments(args.judgments)
    topics = None
    if args.topics:
        topics = {t.topic_id: t for t in load_topics(args.topics)}
    bundle = evaluate_judgments(
        pools,
        judgments,
        kappa_threshold=args.kappa_threshold,
        overlap_threshold=args.overlap_threshold,
        topics=topics,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(bundle_to_dict(bundle), fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(f"metrics written to {args.out}")
    print(render_text(bundle), end="")
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import bundle_from_dict, bundle_to_dict, reference_bundle, render_text

    if args.reference:
        bundle = reference_bundle(args.kappa_threshold, args.overlap_threshold)
    else:
        if not args.metrics:
            print("error: either --reference or --metrics is required", file=sys.stderr)
            return EXIT_USAGE
        with open(args.metrics, encoding="utf-8") as fh:
            bundle = bundle_from_dict(json.load(fh))
    if args.json:
        json.dump(bundle_to_dict(bundle), sys.stdout, indent=1, sort_keys=True)
        print()
    else:
        print(render_text(bundle), end="")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    from .report import render_text

    config = load_config(args.config)
    for name in ("seed", "depth", "expansion_n", "kappa_threshold", "overlap_threshold"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)
    bundle = run_pipeline(config)
    if args.out:
        out = Path(args.out)
        write_bundle(bundle, out)
        shutil.copy(config.corpus_path, out / "corpus.jsonl")
        shutil.copy(config.topics_path, out / "topics.json")
        # seed the serve store with the scripted judgments
        shutil.copy(out / "judgments.tsv", out / "judgments.log")
        print(f"campaign written to {out}", file=sys.stderr)
    print(render_text(bundle), end="")
    return EXIT_OK


def cmd_demo(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    targets = {
        "demo_corpus.jsonl": "corpus.jsonl",
        "topics.json": "topics.json",
        "demo_campaign.json": "campaign.json",
    }
    for src, dst in targets.items():
        if (out / dst).exists() and not args.force:
            print(f"error: {out / dst} exists (use --force)", file=sys.stderr)
            return EXIT_DATA
        (out / dst).write_bytes(_data_file(src).read_bytes())
    print(f"demo campaign written to {out}; run: irbench pipeline --config "
          f"{out / 'campaign.json'} --out {out / 'results'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="irbench", description=__doc__,
                             formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"irbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus / topics file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--topics")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="build and persist the inverted index")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("train-str", help="train the term recommendation model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_str)

    p = sub.add_parser("search", help="run a boolean query against an index")
    p.add_argument("--index", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--topic", type=int, default=0)
    p.add_argument("--label", default=SOLR)
    p.add_argument("--model", help="recommendation model; expands the query before searching")
    p.add_argument("--expansion-n", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("rerank", help="re-rank a run file")
    p.add_argument("--service", choices=("brad", "auth"), required=True)
    p.add_argument("--run", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--keep-unidentified", action="store_true",
                   help="append ISSN-less docs after the journal groups instead of dropping them")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("pool", help="build assessment pools from a run file")
    p.add_argument("--runs", required=True)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("serve", help="start the assessment HTTP backend")
    p.add_argument("--campaign", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", help="directory with the built assessment UI to serve at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("evaluate", help="compute metrics from pools + judgments")
    p.add_argument("--pools", required=True)
    p.add_argument("--judgments", required=True)
    p.add_argument("--topics")
    p.add_argument("--kappa-threshold", type=float, default=0.40)
    p.add_argument("--overlap-threshold", type=float, default=0.35)
    p.add_argument("--out", help="write machine-readable metrics JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="render reports")
    p.add_argument("--reference", action="store_true",
                   help="render the bundled reference study tables")
    p.add_argument("--metrics", help="a report.json produced by evaluate/pipeline")
    p.add_argument("--json", action="store_true")
    p.add_argument("--kappa-threshold", type=float, default=0.40)
    p.add_argument("--overlap-threshold", type=float, default=0.35)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("pipeline", help="run the whole campaign end to end")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--expansion-n", type=int)
    p.add_argument("--kappa-threshold", type=float)
    p.add_argument("--overlap-threshold", type=float)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("demo", help="write the bundled synthetic campaign")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits for --help/--version/usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (CorpusError, FormatError, QuerySyntaxError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
