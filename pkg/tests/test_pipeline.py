import json
import shutil
from pathlib import Path

import pytest

from irbench.cli import main
from irbench.corpus import save_corpus
from irbench.formats import load_judgments, load_pools
from irbench.pipeline import (
    CampaignConfig,
    PipelineError,
    evaluate_judgments,
    load_config,
    run_pipeline,
    write_bundle,
)
from irbench.report import bundle_to_dict, reference_bundle, render_text
from irbench.synthetic import (
    demo_assessors,
    demo_queries,
    generate_corpus,
    relevance_terms,
)

TOPICS_SRC = Path(__file__).resolve().parent.parent / "src" / "irbench" / "data" / "topics.json"


@pytest.fixture(scope="module")
def campaign(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("campaign")
    save_corpus(generate_corpus(), tmp / "corpus.jsonl")
    shutil.copy(TOPICS_SRC, tmp / "topics.json")
    return CampaignConfig(
        corpus_path=tmp / "corpus.jsonl",
        topics_path=tmp / "topics.json",
        queries=demo_queries(),
        relevance_terms=relevance_terms(),
        assessors=demo_assessors(),
        seed=7,
    )


@pytest.fixture(scope="module")
def bundle(campaign):
    return run_pipeline(campaign)


def test_pipeline_covers_all_topics(bundle):
    assert [m.topic_id for m in bundle.metrics] == sorted(demo_queries())
    assert len(bundle.runs) == 4 * len(bundle.metrics)


def test_pool_sizes_within_bounds(bundle, campaign):
    for pool in bundle.pools.values():
        assert campaign.depth <= len(pool) <= 4 * campaign.depth


def test_pipeline_deterministic(campaign, bundle, tmp_path):
    again = run_pipeline(campaign)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    write_bundle(bundle, out1)
    write_bundle(again, out2)
    for name in ("runs.tsv", "pools.json", "judgments.tsv", "report.txt", "report.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_seed_changes_pool_order(campaign):
    import dataclasses

    other = dataclasses.replace(campaign, seed=8)
    b1, b2 = run_pipeline(campaign), run_pipeline(other)
    assert any(
        b1.pools[t].doc_ids() != b2.pools[t].doc_ids() for t in b1.pools
    )


def test_evaluate_matches_pipeline_metrics(bundle, tmp_path):
    # no hidden state: re-evaluating the written artifacts gives the same metrics
    out = tmp_path / "out"
    write_bundle(bundle, out)
    pools = load_pools(out / "pools.json")
    judgments = load_judgments(out / "judgments.tsv")
    re_bundle = evaluate_judgments(
        pools, judgments,
        kappa_threshold=bundle.kappa_threshold,
        overlap_threshold=bundle.overlap_threshold,
    )
    assert re_bundle.metrics == bundle.metrics
    assert re_bundle.averages == bundle.averages
    assert re_bundle.intersections == bundle.intersections


def test_depth_one_single_topic_pool_bound(campaign):
    import dataclasses

    shallow = dataclasses.replace(
        campaign, queries={166: campaign.queries[166]}, depth=1
    )
    result = run_pipeline(shallow)
    assert len(result.pools[166]) <= 4


def test_unknown_topic_in_queries_fails_with_context(campaign):
    import dataclasses

    broken = dataclasses.replace(campaign, queries={999: "war"})
    with pytest.raises(PipelineError, match="topic 999"):
        run_pipeline(broken)


def test_intersections_match_set_oracle(bundle):
    from irbench.evalkit import complete_submatrix, relevant_set
    from irbench.index import SERVICE_LABELS

    expected_pairs = {}
    rel = {}
    for m in bundle.metrics:
        topic = m.topic_id
        matrix = complete_submatrix(bundle.judgments, topic)
        for s in SERVICE_LABELS:
            rel[(topic, s)] = relevant_set(matrix, s, bundle.pools[topic])
    for i, s1 in enumerate(SERVICE_LABELS):
        for s2 in SERVICE_LABELS[i + 1:]:
            expected_pairs[(s1, s2)] = sum(
                len(rel[(m.topic_id, s1)] & rel[(m.topic_id, s2)]) for m in bundle.metrics
            )
    assert bundle.intersections.pairs == expected_pairs
    assert bundle.intersections.total == sum(expected_pairs.values())


def test_report_text_contains_all_sections(bundle):
    text = render_text(bundle)
    assert "Agreement per topic" in text
    assert "Judgments and precision per topic" in text
    assert "Query expansion terms" in text
    assert "Pairwise intersections" in text
    assert "avg. (kappa >= 0.40)" in text


def test_bundle_dict_is_json_serializable(bundle):
    payload = bundle_to_dict(bundle)
    parsed = json.loads(json.dumps(payload))
    assert parsed["kappa_threshold"] == 0.40
    assert len(parsed["topics"]) == 10


def test_reference_bundle_renders():
    text = render_text(reference_bundle())
    assert "0.522" in text  # topic 83 agreement
    assert "avg." in text


# -- CLI --


def test_cli_stagewise_matches_pipeline(tmp_path, campaign, bundle, capsys):
    work = tmp_path
    corpus = str(campaign.corpus_path)

    assert main(["ingest", "--corpus", corpus, "--topics", str(campaign.topics_path)]) == 0
    assert main(["index", "--corpus", corpus, "--out", str(work / "index.json")]) == 0
    assert main(["train-str", "--corpus", corpus, "--out", str(work / "model.json")]) == 0

    # baseline search for topic 166 must match the pipeline's SOLR run
    assert main([
        "search", "--index", str(work / "index.json"),
        "--query", demo_queries()[166], "--topic", "166",
        "--limit", "1000", "--out", str(work / "solr.tsv"),
    ]) == 0
    from irbench.formats import load_runs

    (solr_run,) = load_runs(work / "solr.tsv")
    pipeline_solr = next(
        r for r in bundle.runs if r.topic_id == 166 and r.service_label == "SOLR"
    )
    assert solr_run.doc_ids() == pipeline_solr.doc_ids()

    assert main([
        "rerank", "--service", "brad", "--run", str(work / "solr.tsv"),
        "--index", str(work / "index.json"), "--out", str(work / "brad.tsv"),
    ]) == 0
    (brad_run,) = load_runs(work / "brad.tsv")
    pipeline_brad = next(
        r for r in bundle.runs if r.topic_id == 166 and r.service_label == "BRAD"
    )
    assert brad_run.doc_ids() == pipeline_brad.doc_ids()

    assert main([
        "rerank", "--service", "auth", "--run", str(work / "solr.tsv"),
        "--index", str(work / "index.json"), "--out", str(work / "auth.tsv"),
    ]) == 0
    (auth_run,) = load_runs(work / "auth.tsv")
    pipeline_auth = next(
        r for r in bundle.runs if r.topic_id == 166 and r.service_label == "AUTH"
    )
    assert auth_run.doc_ids() == pipeline_auth.doc_ids()
    capsys.readouterr()


def test_cli_demo_and_pipeline_round_trip(tmp_path, capsys):
    demo_dir = tmp_path / "demo"
    assert main(["demo", "--out", str(demo_dir)]) == 0
    assert main([
        "pipeline", "--config", str(demo_dir / "campaign.json"),
        "--out", str(demo_dir / "results"),
    ]) == 0
    capsys.readouterr()
    for name in ("corpus.jsonl", "topics.json", "pools.json", "judgments.tsv",
                 "report.txt", "report.json", "runs.tsv", "judgments.log"):
        assert (demo_dir / "results" / name).exists(), name

    assert main([
        "evaluate", "--pools", str(demo_dir / "results" / "pools.json"),
        "--judgments", str(demo_dir / "results" / "judgments.tsv"),
        "--out", str(demo_dir / "metrics.json"),
    ]) == 0
    capsys.readouterr()
    assert main(["report", "--metrics", str(demo_dir / "metrics.json")]) == 0
    out = capsys.readouterr().out
    assert "Agreement per topic" in out


def test_cli_config_overrides(tmp_path, capsys):
    demo_dir = tmp_path / "demo"
    main(["demo", "--out", str(demo_dir)])
    assert main([
        "pipeline", "--config", str(demo_dir / "campaign.json"),
        "--depth", "3", "--out", str(demo_dir / "shallow"),
    ]) == 0
    capsys.readouterr()
    pools = load_pools(demo_dir / "shallow" / "pools.json")
    assert all(3 <= len(p) <= 12 for p in pools.values())


def test_load_config_resolves_paths_and_assessors(tmp_path):
    demo_dir = tmp_path / "demo"
    main(["demo", "--out", str(demo_dir)])
    config = load_config(demo_dir / "campaign.json")
    assert config.corpus_path == demo_dir / "corpus.jsonl"
    assert config.topics_path == demo_dir / "topics.json"
    assert config.seed == 7
    assert config.depth == 10
    assert config.expansion_n == 4
    assert sorted(config.queries) == sorted(demo_queries())
    assert len(config.assessors) >= 20
    assert all(0 <= a.error_rate <= 1 for a in config.assessors)
    # a config-driven run equals a directly-parameterized run
    bundle = run_pipeline(config)
    assert [m.topic_id for m in bundle.metrics] == sorted(demo_queries())


def test_cli_usage_error_exit_code(capsys):
    assert main(["search", "--query", "war"]) == 1  # missing --index
    capsys.readouterr()


def test_cli_data_error_exit_code(tmp_path, capsys):
    missing = str(tmp_path / "missing.jsonl")
    assert main(["ingest", "--corpus", missing]) == 2
    err = capsys.readouterr().err
    assert "error:" in err


def test_cli_reference_report(capsys):
    assert main(["report", "--reference"]) == 0
    out = capsys.readouterr().out
    assert "0.68" in out  # best unfiltered average


def test_cli_bad_query_is_data_error(tmp_path, capsys):
    corpus = tmp_path / "c.jsonl"
    save_corpus(generate_corpus(1)[:20], corpus)
    index_path = tmp_path / "i.json"
    main(["index", "--corpus", str(corpus), "--out", str(index_path)])
    capsys.readouterr()
    assert main(["search", "--index", str(index_path), "--query", "a AND ("]) == 2
    capsys.readouterr()
