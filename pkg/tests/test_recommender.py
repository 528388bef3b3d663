import math
import random

import pytest

from irbench.corpus import DocumentRecord
from irbench.query import parse_query
from irbench.recommender import (
    AssociationModel,
    load_model,
    recommend_terms,
    save_model,
    train_model,
)


def doc(i, text="", keywords=()):
    return DocumentRecord(
        doc_id=f"d{i}", title=text, abstract="", keywords=tuple(keywords)
    )


def oracle_llr(k11, n_f, n_c, n):
    """Mutual-information form: 2*N*I(f;c), signed by over/under-occurrence."""
    cells = {
        (1, 1): k11,
        (1, 0): n_f - k11,
        (0, 1): n_c - k11,
        (0, 0): n - n_f - n_c + k11,
    }
    rows = {1: n_f, 0: n - n_f}
    cols = {1: n_c, 0: n - n_c}
    total = 0.0
    for (r, c), k in cells.items():
        if k > 0:
            p_joint = k / n
            total += p_joint * math.log(p_joint / ((rows[r] / n) * (cols[c] / n)))
    sign = 1.0 if k11 * n >= n_f * n_c else -1.0
    return sign * 2.0 * n * total


def test_positive_association_outranks_others():
    corpus = [doc(i, "the poor people", ["poverty"]) for i in range(5)]
    corpus += [doc(5 + i, "sunny weather report", ["meteorology"]) for i in range(5)]
    model = train_model(corpus)
    s_pov = model.score("poor", "poverty")
    assert s_pov > 0
    for other in model.controlled_counts:
        if other != "poverty":
            assert s_pov > model.score("poor", other)


def test_never_cooccurring_pair_scores_negative():
    corpus = [doc(i, "alpha text", ["first"]) for i in range(4)]
    corpus += [doc(4 + i, "beta text", ["second"]) for i in range(4)]
    model = train_model(corpus)
    assert model.score("alpha", "second") < 0
    assert model.score("alpha", "first") > model.score("alpha", "second")


def test_score_matches_oracle_on_random_tables():
    rng = random.Random(13)
    for _ in range(300):
        n = rng.randint(2, 200)
        n_f = rng.randint(1, n)
        n_c = rng.randint(1, n)
        k11 = rng.randint(max(0, n_f + n_c - n), min(n_f, n_c))
        model = AssociationModel(
            total_docs=n,
            free_counts={"f": n_f},
            controlled_counts={"c": n_c},
            pair_counts={"f": {"c": k11}} if k11 else {},
        )
        assert model.score("f", "c") == pytest.approx(
            oracle_llr(k11, n_f, n_c, n), abs=1e-9
        )


def test_corpus_without_keywords_is_rejected():
    with pytest.raises(ValueError, match="no controlled vocabulary"):
        train_model([doc(1, "some text", [])])


def test_empty_text_corpus_has_no_free_terms():
    corpus = [doc(i, "", ["poverty"]) for i in range(3)]
    model = train_model(corpus)
    assert model.free_counts == {}
    assert recommend_terms(model, parse_query("poor"), n=4) == []


def seeded_association_corpus():
    # "poverty" co-occurs with povert*/german* tokens in every seeded doc;
    # the other controlled terms co-occur progressively less often.
    corpus = []
    i = 0
    for kws, text, count in [
        (["poverty"], "poverty germany", 10),
        (["Federal Republic of Germany"], "poverty germany", 6),
        (["social assistance"], "poverty german welfare", 5),
        (["immiseration"], "poverty decline", 4),
        (["noise term"], "something unrelated entirely", 8),
    ]:
        for _ in range(count):
            corpus.append(doc(i, text, kws))
            i += 1
    # background docs without the query tokens
    for _ in range(20):
        corpus.append(doc(i, "weather sunshine sports", ["noise term"]))
        i += 1
    return corpus


def test_recommendations_for_seeded_corpus():
    model = train_model(seeded_association_corpus())
    recs = recommend_terms(model, parse_query("povert* AND german*"), n=4)
    assert recs[0] == "poverty"
    assert len(recs) == 4
    assert "noise term" not in recs


def test_top_1_is_best_scoring():
    model = train_model(seeded_association_corpus())
    top4 = recommend_terms(model, parse_query("povert* AND german*"), n=4)
    top1 = recommend_terms(model, parse_query("povert* AND german*"), n=1)
    assert top1 == top4[:1]


def test_unknown_query_terms_give_empty_list():
    model = train_model(seeded_association_corpus())
    assert recommend_terms(model, parse_query("qqqq zzzz"), n=4) == []


def test_recommendation_is_deterministic():
    model = train_model(seeded_association_corpus())
    ast = parse_query("poverty OR german*")
    assert recommend_terms(model, ast, 4) == recommend_terms(model, ast, 4)


def test_phrase_leaves_contribute_free_terms():
    model = train_model(seeded_association_corpus())
    recs = recommend_terms(model, parse_query('"poverty germany"'), n=2)
    assert recs[0] == "poverty"


def test_unrelated_docs_do_not_demote_associated_pair():
    base = [doc(i, "alpha", ["first"]) for i in range(5)]
    base += [doc(5, "beta", ["second"])]
    pad = [doc(100 + i, "gamma", ["third"]) for i in range(50)]

    def rank_gap(corpus):
        model = train_model(corpus)
        return model.score("alpha", "first") - model.score("alpha", "second")

    assert rank_gap(base) > 0
    assert rank_gap(base + pad) > 0


def test_model_save_load_round_trip(tmp_path):
    model = train_model(seeded_association_corpus())
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.total_docs == model.total_docs
    assert loaded.free_counts == model.free_counts
    assert loaded.controlled_counts == model.controlled_counts
    assert loaded.pair_counts == model.pair_counts
    ast = parse_query("povert*")
    assert recommend_terms(loaded, ast, 4) == recommend_terms(model, ast, 4)
