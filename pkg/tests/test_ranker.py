"""Co-occurrence model fitting and ranking, checked against raw-history math."""

import io
import math
import random

import pytest

from planrec.catalog import load_interactions
from planrec.errors import UnknownItem
from planrec.ranker import CoocModel, CoocRanker, RankRequest, fit_cooc, rank, score

from conftest import make_catalog
from oracles import brute_force_cooc_score


def store_from(histories: dict[str, list[str]], catalog=None):
    lines = []
    t = 0
    for user, items in histories.items():
        for item in items:
            t += 1
            lines.append(f"{user}\t{item}\t{t}")
    catalog = catalog or make_catalog()
    return load_interactions(io.BytesIO("\n".join(lines).encode()), catalog)


def test_two_user_hand_example():
    # u1: {A, B}; u2: {A, B, C} with A=g1, B=g2, C=g3
    store = store_from({"u1": ["g1", "g2"], "u2": ["g1", "g2", "g3"]})
    model = fit_cooc(store)
    assert model.cooc("g1", "g2") == 2
    assert model.cooc("g2", "g1") == 2
    assert model.cooc("g1", "g3") == 1
    assert model.pop("g1") == 2
    assert model.pop("g3") == 1
    assert score(model, ["g1"], "g2") == pytest.approx(1.0, abs=1e-12)
    assert score(model, ["g1"], "g3") == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_repeat_interactions_count_once_per_user():
    store = store_from({"u1": ["g1", "g1", "g2", "g2", "g2"]})
    model = fit_cooc(store)
    assert model.cooc("g1", "g2") == 1
    assert model.pop("g1") == 1


def test_score_unseen_item_is_zero():
    store = store_from({"u1": ["g1", "g2"]})
    model = fit_cooc(store)
    assert score(model, ["g1"], "g4") == 0.0


def test_score_unknown_item_rejected():
    store = store_from({"u1": ["g1", "g2"]})
    model = fit_cooc(store)
    with pytest.raises(UnknownItem):
        score(model, ["g1"], "nope")


def test_score_ignores_item_itself_in_history():
    store = store_from({"u1": ["g1", "g2"], "u2": ["g1", "g2", "g3"]})
    model = fit_cooc(store)
    assert score(model, ["g2", "g1"], "g2") == score(model, ["g1"], "g2")


def test_empty_history_scores_zero():
    store = store_from({"u1": ["g1", "g2"]})
    model = fit_cooc(store)
    assert score(model, [], "g1") == 0.0


def test_rank_order_and_ties():
    store = store_from({"u1": ["g1", "g2"], "u2": ["g1", "g2", "g3"]})
    model = fit_cooc(store)
    ranking = rank(model, RankRequest(("g3", "g2", "g4", "g5"), history=("g1",)))
    # scored: g2=1.0, g3=0.707, then the two zero-score items by (pop desc, id asc)
    assert [i for i, _ in ranking] == ["g2", "g3", "g4", "g5"]
    assert ranking[0][1] == pytest.approx(1.0)
    assert ranking[2][1] == 0.0


def test_rank_zero_score_tie_prefers_popular():
    store = store_from({"u1": ["g4"], "u2": ["g4"], "u3": ["g5"]})
    model = fit_cooc(store)
    ranking = rank(model, RankRequest(("g5", "g4"), history=()))
    assert [i for i, _ in ranking] == ["g4", "g5"]


def test_rank_request_dedupes_preserving_order():
    request = RankRequest(("g2", "g1", "g2"))
    assert request.candidates == ("g2", "g1")
    with pytest.raises(ValueError):
        RankRequest(())


def test_cooc_ranker_wraps_model():
    store = store_from({"u1": ["g1", "g2"]})
    ranker = CoocRanker(fit_cooc(store))
    assert [i for i, _ in ranker.rank(RankRequest(("g2",), history=("g1",)))] == ["g2"]


def test_model_without_catalog_limits_known_items():
    model = CoocModel({}, {"x": 1}, frozenset({"x"}))
    with pytest.raises(UnknownItem):
        score(model, [], "y")


def test_score_matches_raw_history_oracle():
    catalog = make_catalog()
    ids = catalog.ids()
    for seed in range(10):
        rng = random.Random(seed)
        histories = {
            f"u{n}": [rng.choice(ids) for _ in range(rng.randint(1, 6))]
            for n in range(rng.randint(2, 8))
        }
        model = fit_cooc(store_from(histories))
        history = [rng.choice(ids) for _ in range(rng.randint(0, 4))]
        for item in ids:
            expected = brute_force_cooc_score(histories, history, item)
            assert score(model, history, item) == pytest.approx(expected, abs=1e-12), (
                seed,
                histories,
                history,
                item,
            )
