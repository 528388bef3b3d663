import random

import pytest

from irbench.evalkit import (
    IncompleteMatrixError,
    Judgment,
    JudgmentMatrix,
    NOT_RELEVANT,
    RELEVANT,
    build_pool,
    complete_submatrix,
    filtered_average_precision,
    fleiss_kappa,
    interpret_kappa,
    intersection_matrix,
    pairwise_overlap,
    precision,
    relevant_set,
    thresholded_mean_overlap,
)
from irbench.fixtures import reference_topic_metrics
from irbench.index import ranked_list


def matrix(rows, topic_id=1):
    """rows: {doc_id: [label, ...]} with one label per rater (None = missing)."""
    n_raters = max(len(v) for v in rows.values())
    raters = tuple(f"r{i}" for i in range(n_raters))
    cells = {}
    for doc_id, labels in rows.items():
        for rater, label in zip(raters, labels):
            if label is not None:
                cells[(doc_id, rater)] = label
    return JudgmentMatrix(topic_id, tuple(sorted(rows)), raters, cells)


R, N = RELEVANT, NOT_RELEVANT


def run_of(doc_ids, label, topic=1):
    return ranked_list(label, topic, [(d, float(len(doc_ids) - i)) for i, d in enumerate(doc_ids)])


# -- Pooling --


def test_identical_runs_pool_to_depth():
    docs = [f"d{i}" for i in range(10)]
    runs = [run_of(docs, label) for label in ("SOLR", "STR", "BRAD", "AUTH")]
    pool = build_pool(runs, depth=10, seed=1)
    assert len(pool) == 10
    assert all(e.services == frozenset({"SOLR", "STR", "BRAD", "AUTH"}) for e in pool.entries)


def test_disjoint_runs_pool_to_four_times_depth():
    runs = [
        run_of([f"{label}-{i}" for i in range(10)], label)
        for label in ("SOLR", "STR", "BRAD", "AUTH")
    ]
    assert len(build_pool(runs, depth=10, seed=1)) == 40


def test_pool_size_with_shared_docs():
    shared = [f"s{i}" for i in range(4)]
    runs = []
    for label in ("SOLR", "STR", "BRAD", "AUTH"):
        own = [f"{label}-{i}" for i in range(6)]
        runs.append(run_of(shared + own, label))
    pool = build_pool(runs, depth=10, seed=3)
    assert len(pool) == 4 + 4 * 6  # 28 distinct docs
    for e in pool.entries:
        if e.doc_id in shared:
            assert len(e.services) == 4


def test_pool_size_lands_in_observed_band():
    # four docs shared between exactly two runs each: 40 slots - 4 dupes = 36
    labels = ("SOLR", "STR", "BRAD", "AUTH")
    own = {label: [f"{label}-{i}" for i in range(10)] for label in labels}
    for k, (a, b) in enumerate((("SOLR", "STR"), ("SOLR", "BRAD"), ("STR", "AUTH"), ("BRAD", "AUTH"))):
        own[a][9 - k] = f"shared-{k}"
        own[b][k] = f"shared-{k}"
    pool = build_pool([run_of(own[label], label) for label in labels], depth=10, seed=9)
    assert len(pool) == 36
    assert 34 <= len(pool) <= 39


def test_pool_order_is_seeded_shuffle():
    docs = [f"d{i}" for i in range(20)]
    runs = [run_of(docs, "SOLR"), run_of(list(reversed(docs)), "STR")]
    p1 = build_pool(runs, depth=20, seed=42)
    p2 = build_pool(runs, depth=20, seed=42)
    p3 = build_pool(runs, depth=20, seed=43)
    assert p1 == p2
    assert p1.doc_ids() != sorted(p1.doc_ids())  # actually shuffled
    assert p1.doc_ids() != p3.doc_ids()


def test_pool_rejects_mismatched_topics():
    with pytest.raises(ValueError, match="mismatched topic"):
        build_pool([run_of(["a"], "SOLR", topic=1), run_of(["a"], "STR", topic=2)])


# -- Fleiss' kappa --


def test_kappa_perfect_agreement_two_categories():
    m = matrix({"d1": [R, R], "d2": [N, N]})
    assert fleiss_kappa(m) == 1.0


def test_kappa_hand_computed_example():
    m = matrix({"d1": [R, R], "d2": [R, N]})
    assert fleiss_kappa(m) == pytest.approx(-1 / 3)


def test_kappa_undefined_when_one_category_only():
    m = matrix({"d1": [R, R], "d2": [R, R]})
    assert fleiss_kappa(m) is None


def test_kappa_requires_complete_matrix():
    m = matrix({"d1": [R, R], "d2": [R, None]})
    with pytest.raises(IncompleteMatrixError, match="complete_submatrix"):
        fleiss_kappa(m)


def test_kappa_requires_two_raters():
    m = matrix({"d1": [R], "d2": [N]})
    with pytest.raises(ValueError, match="raters"):
        fleiss_kappa(m)


def random_matrix(rng, max_subjects=20, max_raters=15):
    n_docs = rng.randint(2, max_subjects)
    n_raters = rng.randint(2, max_raters)
    return matrix(
        {
            f"d{i}": [rng.choice([R, N]) for _ in range(n_raters)]
            for i in range(n_docs)
        }
    )


def test_kappa_invariant_under_subject_and_rater_permutation():
    rng = random.Random(5)
    for _ in range(50):
        m = random_matrix(rng)
        k = fleiss_kappa(m)

        perm_docs = list(m.doc_ids)
        rng.shuffle(perm_docs)
        m_docs = JudgmentMatrix(m.topic_id, tuple(perm_docs), m.raters, m.cells)
        perm_raters = list(m.raters)
        rng.shuffle(perm_raters)
        m_raters = JudgmentMatrix(m.topic_id, m.doc_ids, tuple(perm_raters), m.cells)

        if k is None:
            assert fleiss_kappa(m_docs) is None
            assert fleiss_kappa(m_raters) is None
        else:
            assert fleiss_kappa(m_docs) == pytest.approx(k, abs=1e-12)
            assert fleiss_kappa(m_raters) == pytest.approx(k, abs=1e-12)


def test_kappa_near_zero_for_independent_uniform_ratings():
    rng = random.Random(12345)
    m = matrix(
        {f"d{i}": [rng.choice([R, N]) for _ in range(10)] for i in range(500)}
    )
    assert abs(fleiss_kappa(m)) < 0.1


# -- Kappa interpretation --


@pytest.mark.parametrize(
    "value,band",
    [
        (-0.2, "poor"),
        (0.0, "slight"),
        (0.19, "slight"),
        (0.2, "fair"),
        (0.304, "fair"),
        (0.4, "moderate"),
        (0.522, "moderate"),
        (0.6, "substantial"),
        (0.8, "almost perfect"),
        (1.0, "almost perfect"),
    ],
)
def test_interpret_kappa_bands(value, band):
    assert interpret_kappa(value) == band


def test_interpret_kappa_rejects_nan():
    with pytest.raises(ValueError):
        interpret_kappa(float("nan"))


# -- Overlap --


def test_overlap_identical_sets():
    assert pairwise_overlap({"a", "b"}, {"a", "b"}) == (1.0, False)


def test_overlap_disjoint_sets():
    assert pairwise_overlap({"a"}, {"b"}).value == 0.0


def test_overlap_half():
    assert pairwise_overlap({1, 2, 3}, {2, 3, 4}).value == 0.5


def test_overlap_vacuous():
    value, vacuous = pairwise_overlap(set(), set())
    assert value == 1.0 and vacuous


def test_mean_overlap_all_agree():
    m = matrix({f"d{i}": [R, R] for i in range(10)})
    assert thresholded_mean_overlap(m, 1.0) == 1.0


def test_mean_overlap_eight_of_ten():
    rows = {f"d{i}": [R, R] for i in range(8)}
    rows["d8"] = [R, N]
    rows["d9"] = [N, R]
    m = matrix(rows)
    assert thresholded_mean_overlap(m, 1.0) == 0.8


def test_two_rater_thresholds_coincide():
    rng = random.Random(9)
    for _ in range(50):
        m = matrix({f"d{i}": [rng.choice([R, N]) for _ in range(2)] for i in range(10)})
        assert thresholded_mean_overlap(m, 0.8) == thresholded_mean_overlap(m, 1.0)


def test_mean_overlap_non_increasing_in_threshold():
    rng = random.Random(10)
    for _ in range(30):
        m = random_matrix(rng, max_subjects=15, max_raters=9)
        values = [thresholded_mean_overlap(m, t) for t in (0.5, 0.6, 0.8, 0.9, 1.0)]
        assert values == sorted(values, reverse=True)


def test_140_of_400_gives_035_exactly():
    rows = {}
    for i in range(140):
        rows[f"agree{i:03d}"] = [R, R, R]
    for i in range(260):
        rows[f"mixed{i:03d}"] = [R, R, N]
    m = matrix(rows)
    assert thresholded_mean_overlap(m, 1.0) == 0.35


# -- Completeness filtering --


def J(assessor, doc, label, topic=1, ts=0.0):
    return Judgment(assessor, topic, doc, label, ts)


def test_complete_submatrix_identity_when_complete():
    judgments = [J(a, d, R) for a in ("a1", "a2") for d in ("d1", "d2", "d3")]
    m = complete_submatrix(judgments, 1)
    assert m.raters == ("a1", "a2")
    assert m.doc_ids == ("d1", "d2", "d3")
    assert m.is_complete()


def test_complete_submatrix_drops_sparse_rater():
    docs = [f"d{i:02d}" for i in range(40)]
    judgments = [J(a, d, R) for a in ("a1", "a2") for d in docs]
    judgments += [J("a3", d, N) for d in docs[:39]]  # judged 39 of 40
    m = complete_submatrix(judgments, 1)
    assert m.raters == ("a1", "a2")
    assert len(m.doc_ids) == 40
    assert m.is_complete()


def test_complete_submatrix_insufficient_raters():
    judgments = [J("a1", "d1", R), J("a1", "d2", R), J("a2", "d1", R)]
    # dropping a2 leaves one rater; dropping neither leaves a hole at (d2, a2)
    with pytest.raises(ValueError, match="insufficient raters"):
        complete_submatrix(judgments, 1)


def test_complete_submatrix_resubmission_overwrites():
    judgments = [
        J("a1", "d1", R, ts=1.0),
        J("a1", "d1", N, ts=2.0),
        J("a2", "d1", R, ts=1.0),
        J("a1", "d2", R, ts=1.0),
        J("a2", "d2", R, ts=1.0),
    ]
    m = complete_submatrix(judgments, 1)
    assert m.label("d1", "a1") == N


def test_complete_submatrix_ignores_other_topics():
    judgments = [J(a, d, R) for a in ("a1", "a2") for d in ("d1", "d2")]
    judgments += [J("a9", "x1", N, topic=2)]
    m = complete_submatrix(judgments, 1)
    assert m.raters == ("a1", "a2")


def test_drop_ties_resolved_by_assessor_id():
    # a1/a2 complete; a3 and a4 each judged a different half
    docs = [f"d{i}" for i in range(4)]
    judgments = [J(a, d, R) for a in ("a1", "a2") for d in docs]
    judgments += [J("a3", d, R) for d in docs[:2]]
    judgments += [J("a4", d, R) for d in docs[2:]]
    m = complete_submatrix(judgments, 1)
    assert m.raters == ("a1", "a2")


# -- Precision --


def pool_with(credits, topic=1):
    """credits: {doc_id: set of services}."""
    runs = {}
    for doc_id, services in credits.items():
        for s in services:
            runs.setdefault(s, []).append(doc_id)
    return build_pool(
        [run_of(sorted(docs), label, topic) for label, docs in sorted(runs.items())],
        depth=max(len(d) for d in runs.values()),
        seed=0,
    )


def synth_judgments(doc_id, relevant, not_relevant, topic=1):
    out = [J(f"a{i}", doc_id, R, topic) for i in range(relevant)]
    out += [J(f"a{relevant + i}", doc_id, N, topic) for i in range(not_relevant)]
    return out


def test_precision_from_counts():
    pool = pool_with({"p1": {"AUTH"}})
    assert precision(synth_judgments("p1", 72, 28), "AUTH", pool) == pytest.approx(0.72)
    assert precision(synth_judgments("p1", 9, 51), "AUTH", pool) == pytest.approx(0.15)


def test_precision_zero_relevant():
    pool = pool_with({"p1": {"SOLR"}})
    assert precision(synth_judgments("p1", 0, 10), "SOLR", pool) == 0.0


def test_precision_absent_when_nothing_judged():
    pool = pool_with({"p1": {"SOLR"}, "p2": {"STR"}})
    assert precision(synth_judgments("p1", 3, 2), "STR", pool) is None


def test_precision_duplicates_count_for_all_crediting_services():
    pool = pool_with({"shared": {"SOLR", "STR"}, "only": {"SOLR"}})
    judgments = synth_judgments("shared", 2, 0) + synth_judgments("only", 0, 2)
    assert precision(judgments, "STR", pool) == 1.0
    assert precision(judgments, "SOLR", pool) == 0.5


def test_precision_between_disjoint_subset_precisions():
    rng = random.Random(3)
    for _ in range(30):
        pool = pool_with({"x": {"SOLR"}, "y": {"SOLR"}})
        jx = synth_judgments("x", rng.randint(1, 10), rng.randint(1, 10))
        jy = synth_judgments("y", rng.randint(1, 10), rng.randint(1, 10))
        px = precision(jx, "SOLR", pool)
        py = precision(jy, "SOLR", pool)
        both = precision(jx + jy, "SOLR", pool)
        assert min(px, py) <= both <= max(px, py)


# -- Filtered averages --


def test_filtered_average_single_topic_is_verbatim():
    m = reference_topic_metrics()
    only_93 = [t for t in m if t.topic_id == 93]
    avg = filtered_average_precision(only_93, mode="none")
    assert avg == only_93[0].precision


def test_filter_nothing_left_is_an_error():
    metrics = reference_topic_metrics()
    with pytest.raises(ValueError, match="empty topic set"):
        filtered_average_precision(metrics, mode="kappa", kappa_threshold=0.99)


def test_unknown_filter_mode():
    with pytest.raises(ValueError, match="unknown filter mode"):
        filtered_average_precision(reference_topic_metrics(), mode="median")


# -- Relevant sets and intersections --


def test_relevant_set_unanimous():
    pool = pool_with({f"d{i}": {"SOLR"} for i in range(10)})
    m = matrix({f"d{i}": [R, R] for i in range(10)})
    assert relevant_set(m, "SOLR", pool) == {f"d{i}" for i in range(10)}


def test_relevant_set_tie_counts_as_not_relevant():
    pool = pool_with({"d1": {"SOLR"}, "d2": {"SOLR"}})
    m = matrix({"d1": [R, N], "d2": [R, R]})
    assert relevant_set(m, "SOLR", pool) == {"d2"}


def test_relevant_set_matches_counting_oracle():
    rng = random.Random(77)
    for _ in range(30):
        n_docs, n_raters = rng.randint(2, 12), rng.randint(2, 7)
        rows = {
            f"d{i}": [rng.choice([R, N]) for _ in range(n_raters)]
            for i in range(n_docs)
        }
        pool = pool_with({d: {"AUTH"} for d in rows})
        m = matrix(rows)
        expected = {
            d for d, labels in rows.items() if labels.count(R) > labels.count(N)
        }
        assert relevant_set(m, "AUTH", pool) == expected


def test_intersection_matrix_identical_sets():
    rel = {
        (t, s): {f"d{t}_{i}" for i in range(10)}
        for t in range(10)
        for s in ("AUTH", "BRAD", "SOLR", "STR")
    }
    result = intersection_matrix(rel)
    assert all(count == 100 for count in result.pairs.values())
    assert result.total == 600


def test_intersection_matrix_disjoint_sets():
    rel = {
        (t, s): {f"{s}_{t}_{i}" for i in range(10)}
        for t in range(3)
        for s in ("AUTH", "SOLR")
    }
    result = intersection_matrix(rel)
    assert result.pairs == {("AUTH", "SOLR"): 0}
    assert result.total == 0


def test_intersection_matrix_known_shape():
    # engineered pairwise counts: the four-service pattern with 36 total
    targets = {
        ("AUTH", "BRAD"): 3,
        ("AUTH", "SOLR"): 3,
        ("AUTH", "STR"): 5,
        ("BRAD", "SOLR"): 6,
        ("BRAD", "STR"): 5,
        ("SOLR", "STR"): 14,
    }
    rel = {(1, s): set() for s in ("AUTH", "BRAD", "SOLR", "STR")}
    for i, (pair, count) in enumerate(sorted(targets.items())):
        for j in range(count):
            token = f"{i}_{j}"
            rel[(1, pair[0])].add(token)
            rel[(1, pair[1])].add(token)
    result = intersection_matrix(rel)
    assert result.pairs == targets
    assert result.total == 36


def test_intersection_counts_bounded_by_set_sizes():
    rng = random.Random(31)
    universe = [f"d{i}" for i in range(30)]
    rel = {
        (t, s): set(rng.sample(universe, rng.randint(0, 15)))
        for t in range(4)
        for s in ("AUTH", "BRAD", "SOLR", "STR")
    }
    result = intersection_matrix(rel)
    for (s1, s2), count in result.pairs.items():
        bound = sum(
            min(len(rel[(t, s1)]), len(rel[(t, s2)])) for t in range(4)
        )
        assert 0 <= count <= bound
