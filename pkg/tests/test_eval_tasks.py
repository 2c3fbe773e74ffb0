import numpy as np
import pytest

from fairembed.errors import DegenerateInputError
from fairembed.evaluation import (ProbeConfig, edge_auc, filtered_embeddings,
                                  heldout_combination_eval, majority_baseline,
                                  mean_rank, prediction_bias, probe_leakage,
                                  random_baseline, rating_rmse,
                                  tradeoff_sweep, validate_lambdas)
from fairembed.errors import ConfigError
from fairembed.fairness import FilterBank, NetSpec
from fairembed.graph import (AttributeTable, Graph, NegativeSampler,
                             NegativeSamplerConfig, slot_pools)
from fairembed.models import DotModel, RatingModel


def kg_graph(n_nodes=20, n_rel=2, n_edges=50, seed=0):
    rng = np.random.default_rng(seed)
    seen = set()
    while len(seen) < n_edges:
        h, t = rng.integers(n_nodes, size=2)
        if h != t:
            seen.add((int(h), int(rng.integers(n_rel)), int(t)))
    return Graph([f"n{i}" for i in range(n_nodes)],
                 np.zeros(n_nodes, dtype=int), ["entity"],
                 [f"r{i}" for i in range(n_rel)], np.array(sorted(seen)))


# ------------------------------------------------------------- mean rank

class _AlwaysRight:
    def score_all_candidates(self, edge, slot, reprs_all, candidates):
        col = 0 if slot == "head" else 2
        return (np.asarray(candidates) == edge[col]).astype(float)


class _RandomScores:
    def __init__(self, seed):
        self.rng = np.random.default_rng(seed)

    def score_all_candidates(self, edge, slot, reprs_all, candidates):
        return self.rng.normal(size=len(candidates))


def test_mean_rank_perfect_model():
    g = kg_graph()
    assert mean_rank(_AlwaysRight(), np.zeros((g.num_nodes, 2)),
                     g.edges[:10]) == 1.0


def test_mean_rank_random_scores_expectation():
    edges = np.array([[0, 0, 1]] * 2000)
    got = mean_rank(_RandomScores(7), np.zeros((3, 2)), edges,
                    sides=("tail",))
    assert abs(got - 2.0) < 0.06


def test_mean_rank_matches_bruteforce():
    g = kg_graph(n_nodes=30, n_edges=60, seed=4)
    model = DotModel(g, 6, np.random.default_rng(1), dtype=np.float64)
    reprs = model.base_all()
    got = mean_rank(model, reprs, g.edges[:25])

    # oracle: enumerate candidate triples one by one, sort-based midrank
    total, n = 0.0, 0
    for h, r, t in g.edges[:25]:
        for slot, true_id in (("head", h), ("tail", t)):
            scores = []
            for cand in range(g.num_nodes):
                e = (cand, r, t) if slot == "head" else (h, r, cand)
                scores.append(float(reprs[e[0]] @ reprs[e[2]]))
            s_true = scores[true_id]
            better = sum(s > s_true for s in scores)
            ties = sum(s == s_true for s in scores) - 1
            total += 1 + better + 0.5 * ties
            n += 1
    assert got == pytest.approx(total / n, abs=1e-12)


def test_mean_rank_respects_type_pools():
    edges = np.array([[0, 0, 2], [1, 0, 3]])
    types = np.array([0, 0, 1, 1])
    g = Graph(["u0", "u1", "i0", "i1"], types, ["user", "item"], ["r"], edges)
    model = DotModel(g, 4, np.random.default_rng(0), dtype=np.float64)
    pools = slot_pools(g, g.edges, type_constrained=True)
    got = mean_rank(model, model.base_all(), g.edges, sides=("tail",),
                    pools=pools)
    assert 1.0 <= got <= 2.0  # only two item candidates exist


# -------------------------------------------------------------- edge auc

def test_edge_auc_perfect_and_oracle():
    g = kg_graph(n_nodes=15, n_edges=40, seed=2)
    model = DotModel(g, 5, np.random.default_rng(3), dtype=np.float64)
    reprs = model.base_all()
    sampler = NegativeSampler(g, g.edges, NegativeSamplerConfig(1, "both"))
    got = edge_auc(model, reprs, g.edges, sampler, np.random.default_rng(11))

    negs, _ = sampler.sample(g.edges, np.random.default_rng(11))
    s_pos = [float(reprs[h] @ reprs[t]) for h, r, t in g.edges]
    s_neg = [float(reprs[h] @ reprs[t]) for h, r, t in negs.reshape(-1, 3)]
    total = 0.0
    for p in s_pos:
        for q in s_neg:
            total += 1.0 if p > q else (0.5 if p == q else 0.0)
    assert got == pytest.approx(total / (len(s_pos) * len(s_neg)), abs=1e-12)


def test_edge_auc_random_scores_near_half():
    rng = np.random.default_rng(5)
    n = 5000
    g = kg_graph(n_nodes=50, n_edges=200, seed=8)

    class Rand:
        def score_edges(self, edges, reprs):
            return rng.normal(size=len(np.atleast_2d(edges)))

    sampler = NegativeSampler(g, g.edges, NegativeSamplerConfig(1, "both"))
    edges = g.edges[rng.integers(0, len(g.edges), size=n)]
    # duplicate edges are fine for scoring purposes here
    got = edge_auc(Rand(), None, edges, sampler, np.random.default_rng(1))
    assert abs(got - 0.5) < 0.02


# ------------------------------------------------------------------ rmse

def rating_setup(seed=0):
    rng = np.random.default_rng(seed)
    n_users, n_items, n_rel = 12, 6, 5
    edges = []
    for u in range(n_users):
        for v in rng.choice(n_items, size=3, replace=False):
            edges.append((u, int(rng.integers(n_rel)), n_users + int(v)))
    types = np.array([0] * n_users + [1] * n_items)
    g = Graph([f"u{i}" for i in range(n_users)]
              + [f"i{i}" for i in range(n_items)], types, ["user", "item"],
              [str(r + 1) for r in range(n_rel)], np.array(edges))
    attrs = AttributeTable("user", ["x"], [2], np.arange(n_users),
                           rng.integers(0, 2, size=(n_users, 1)))
    model = RatingModel(g, 4, np.random.default_rng(seed + 1),
                        dtype=np.float64)
    return g, attrs, model


def test_rating_rmse_range_and_pointmass():
    g, attrs, model = rating_setup()
    reprs = model.base_all()
    got = rating_rmse(model, reprs, g.edges)
    assert 0.0 <= got <= 4.0

    class PointMass:
        rating_values = model.rating_values

        def expected_ratings(self, edges, reprs_all):
            return model.rating_values[np.asarray(edges)[:, 1]]

    assert rating_rmse(PointMass(), None, g.edges) == 0.0


# --------------------------------------------------------------- probes

def test_probe_recovers_onehot_attribute():
    rng = np.random.default_rng(0)
    n = 300
    labels = rng.integers(0, 2, size=n)
    emb = np.zeros((n, 6), dtype=np.float32)
    emb[np.arange(n), labels] = 1.0
    attrs = AttributeTable("user", ["x"], [2], np.arange(n), labels[:, None])
    score = probe_leakage(emb, attrs, 0, split_seed=3,
                          probe=ProbeConfig(epochs=30))
    assert score > 0.95


def test_probe_near_chance_on_constant_embeddings():
    rng = np.random.default_rng(1)
    n = 300
    labels = rng.integers(0, 2, size=n)
    emb = np.ones((n, 6), dtype=np.float32)
    attrs = AttributeTable("user", ["x"], [2], np.arange(n), labels[:, None])
    scores = [probe_leakage(emb, attrs, 0, split_seed=s,
                            probe=ProbeConfig(epochs=10))
              for s in range(5)]
    assert abs(np.mean(scores) - 0.5) < 0.05


def test_probe_deterministic():
    rng = np.random.default_rng(2)
    n = 200
    labels = rng.integers(0, 3, size=n)
    emb = rng.normal(size=(n, 5)).astype(np.float32)
    attrs = AttributeTable("user", ["x"], [3], np.arange(n), labels[:, None])
    a = probe_leakage(emb, attrs, 0, split_seed=7, probe=ProbeConfig(epochs=5))
    b = probe_leakage(emb, attrs, 0, split_seed=7, probe=ProbeConfig(epochs=5))
    assert a == b


def test_baselines():
    rng = np.random.default_rng(4)
    n = 500
    binary = AttributeTable("user", ["x"], [2], np.arange(n),
                            rng.integers(0, 2, size=(n, 1)))
    assert majority_baseline(binary, 0, split_seed=0) == 0.5
    assert random_baseline(binary, 0) == 0.5

    vals = rng.choice(7, size=n, p=[0.36, 0.2, 0.14, 0.1, 0.1, 0.05, 0.05])
    multi = AttributeTable("user", ["age"], [7], np.arange(n), vals[:, None])
    maj = majority_baseline(multi, 0, split_seed=0)
    assert 0.2 < maj < 0.55  # near the majority class frequency
    assert random_baseline(multi, 0) == pytest.approx(1 / 7)


# ------------------------------------------------------- prediction bias

def test_prediction_bias_constant_model_is_zero():
    g, attrs, model = rating_setup()

    class Constant:
        def expected_ratings(self, edges, reprs_all):
            return np.full(len(np.atleast_2d(edges)), 3.0)

    users = np.arange(12)
    items = np.arange(12, 18)
    assert prediction_bias(Constant(), None, users, items, attrs, 0) == 0.0


def test_prediction_bias_hand_set_difference():
    n_users, n_items = 4, 3
    attrs = AttributeTable("user", ["x"], [2], np.arange(n_users),
                           np.array([[0], [0], [1], [1]]))

    class Shifted:
        def expected_ratings(self, edges, reprs_all):
            e = np.atleast_2d(edges)
            return np.where(e[:, 0] < 2, 3.0, 3.4)

    users = np.arange(n_users)
    items = np.arange(n_items)
    got = prediction_bias(Shifted(), None, users, items, attrs, 0)
    assert got == pytest.approx(0.4)


def test_prediction_bias_multigroup_matches_bruteforce():
    rng = np.random.default_rng(6)
    n_users, n_items = 9, 4
    vals = np.array([0, 0, 0, 1, 1, 1, 2, 2, 2])
    attrs = AttributeTable("user", ["x"], [3], np.arange(n_users),
                           vals[:, None])
    table = rng.normal(loc=3, size=(n_users, n_items))

    class Table:
        def expected_ratings(self, edges, reprs_all):
            e = np.atleast_2d(edges)
            return table[e[:, 0], e[:, 2]]

    got = prediction_bias(Table(), None, np.arange(n_users),
                          np.arange(n_items), attrs, 0)
    per_item = []
    for j in range(n_items):
        means = [table[vals == c, j].mean() for c in range(3)]
        diffs = [abs(means[a] - means[b])
                 for a in range(3) for b in range(a + 1, 3)]
        per_item.append(np.mean(diffs))
    assert got == pytest.approx(np.mean(per_item), abs=1e-12)


def test_prediction_bias_invariant_under_relabeling():
    g, attrs, model = rating_setup(seed=3)
    users = np.arange(12)
    items = np.arange(12, 18)
    reprs = model.base_all()
    a = prediction_bias(model, reprs, users, items, attrs, 0)
    flipped = AttributeTable("user", ["x"], [2], attrs.node_ids,
                             1 - attrs.values)
    b = prediction_bias(model, reprs, users, items, flipped, 0)
    assert a == pytest.approx(b, abs=1e-12)


def test_prediction_bias_needs_two_groups():
    attrs = AttributeTable("user", ["x"], [2], np.arange(4),
                           np.zeros((4, 1), dtype=int))

    class Any:
        def expected_ratings(self, edges, reprs_all):
            return np.ones(len(np.atleast_2d(edges)))

    with pytest.raises(DegenerateInputError):
        prediction_bias(Any(), None, np.arange(4), np.arange(2), attrs, 0)


# --------------------------------------------------------------- sweeps

def test_validate_lambdas():
    assert validate_lambdas([0, 10, 100]) == [0.0, 10.0, 100.0]
    with pytest.raises(ConfigError):
        validate_lambdas([10, 0])
    with pytest.raises(ConfigError):
        validate_lambdas([0, 0])
    with pytest.raises(ConfigError):
        validate_lambdas([-1, 0])


def test_tradeoff_sweep_rows():
    rows = tradeoff_sweep([0, 1], lambda lam: {"m": lam * 2})
    assert rows == [{"lambda": 0.0, "metric": "m", "value": 0.0},
                    {"lambda": 1.0, "metric": "m", "value": 2.0}]


def test_heldout_eval_empty_heldout_reports_seen_only():
    rng = np.random.default_rng(8)
    n = 120
    g = kg_graph(n_nodes=n, n_edges=200, seed=5)
    attrs = AttributeTable("entity", ["a", "b"], [2, 2], np.arange(n),
                           rng.integers(0, 2, size=(n, 2)))
    model = DotModel(g, 6, np.random.default_rng(0))
    filters = FilterBank(2, 6, np.random.default_rng(1), spec=NetSpec(2, 12))
    out = heldout_combination_eval(model, filters, attrs, [], split_seed=0,
                                   probe=ProbeConfig(epochs=2))
    assert out["heldout"] == {}
    assert np.isnan(out["heldout_mean"])
    assert 0.0 <= out["seen_mean"] <= 1.0
    assert len(out["seen"]) == 3  # non-empty masks over K=2


def test_filtered_embeddings_only_touch_tstar_rows():
    g = kg_graph(n_nodes=10, n_edges=20, seed=6)
    model = DotModel(g, 4, np.random.default_rng(2))
    filters = FilterBank(1, 4, np.random.default_rng(3), spec=NetSpec(2, 8))
    tstar = np.arange(5)
    out = filtered_embeddings(model, tstar, filters, np.array([True]))
    assert (out[5:] == model.emb[5:]).all()
    assert not (out[:5] == model.emb[:5]).all()


def test_probe_degenerate_split_error():
    from fairembed.errors import DegenerateSplitError
    emb = np.random.default_rng(0).normal(size=(50, 4)).astype(np.float32)
    constant = AttributeTable("user", ["x"], [2], np.arange(50),
                              np.zeros((50, 1), dtype=int))
    with pytest.raises(DegenerateSplitError):
        probe_leakage(emb, constant, 0, split_seed=0,
                      probe=ProbeConfig(epochs=1))


def test_rating_rmse_argmax_flag():
    g, attrs, model = rating_setup()
    reprs = model.base_all()
    expected = rating_rmse(model, reprs, g.edges, prediction="expected")
    modal = rating_rmse(model, reprs, g.edges, prediction="argmax")
    assert expected != modal  # different estimators in general
    with pytest.raises(ValueError):
        rating_rmse(model, reprs, g.edges, prediction="median")
