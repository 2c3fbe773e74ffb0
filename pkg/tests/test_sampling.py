import numpy as np
import pytest

from fairembed.errors import ConfigError
from fairembed.graph import (Graph, NegativeSampler, NegativeSamplerConfig,
                             batch_iter, split_edges)


def toy_graph(n_edges=100, n_nodes=40, n_rel=2, seed=0):
    rng = np.random.default_rng(seed)
    seen = set()
    while len(seen) < n_edges:
        seen.add((int(rng.integers(n_nodes)), int(rng.integers(n_rel)),
                  int(rng.integers(n_nodes))))
    return Graph([f"n{i}" for i in range(n_nodes)],
                 np.zeros(n_nodes, dtype=int), ["entity"], ["a", "b"][:n_rel],
                 np.array(sorted(seen)))


def bipartite_graph():
    edges = np.array([[0, 0, 3], [1, 0, 3], [2, 0, 4], [0, 0, 4]])
    types = np.array([0, 0, 0, 1, 1])
    return Graph(["u0", "u1", "u2", "i0", "i1"], types, ["user", "item"],
                 ["r"], edges)


def test_split_partitions_exactly():
    g = toy_graph()
    s = split_edges(g, 0.9, seed=3)
    assert len(s.train_edges) == 90
    assert len(s.test_edges) == 10
    all_keys = set(g.edge_keys().tolist())
    got = set(g.edge_keys(s.train_edges).tolist()) | set(g.edge_keys(s.test_edges).tolist())
    assert got == all_keys
    assert not (set(g.edge_keys(s.train_edges).tolist())
                & set(g.edge_keys(s.test_edges).tolist()))


def test_split_deterministic_in_seed():
    g = toy_graph()
    a = split_edges(g, 0.8, seed=7)
    b = split_edges(g, 0.8, seed=7)
    assert np.array_equal(a.train_edges, b.train_edges)
    c = split_edges(g, 0.8, seed=8)
    assert not np.array_equal(a.train_edges, c.train_edges)


def test_split_ratio_validation():
    g = toy_graph()
    with pytest.raises(ConfigError):
        split_edges(g, 1.5, seed=0)


def test_batch_iter_sizes_and_determinism():
    edges = np.arange(30).reshape(10, 3)
    sizes = [len(b) for b in batch_iter(edges, 4, 0)]
    assert sizes == [4, 4, 2]
    a = np.concatenate(list(batch_iter(edges, 4, 5)))
    b = np.concatenate(list(batch_iter(edges, 4, 5)))
    assert np.array_equal(a, b)


def test_batch_iter_different_seeds_differ():
    edges = np.arange(3000).reshape(1000, 3)
    a = np.concatenate(list(batch_iter(edges, 128, 1)))
    b = np.concatenate(list(batch_iter(edges, 128, 2)))
    assert not np.array_equal(a, b)


def test_two_node_filtered_sampling_returns_the_nonedge():
    g = Graph(["a", "b"], np.zeros(2, dtype=int), ["entity"], ["r"],
              np.array([[0, 0, 1]]))
    cfg = NegativeSamplerConfig(num_negatives=1, mode="tail", filtered=True)
    sampler = NegativeSampler(g, g.edges, cfg)
    negs, flags = sampler.sample(g.edges, np.random.default_rng(0))
    assert negs.tolist() == [[[0, 0, 0]]]
    assert not flags.any()


def test_negatives_differ_in_exactly_one_slot():
    g = toy_graph()
    cfg = NegativeSamplerConfig(num_negatives=5, mode="both")
    sampler = NegativeSampler(g, g.edges, cfg)
    negs, _ = sampler.sample(g.edges, np.random.default_rng(1))
    for pos, row in zip(g.edges, negs):
        for neg in row:
            same = [neg[0] == pos[0], neg[1] == pos[1], neg[2] == pos[2]]
            assert same[1]  # relation never corrupted
            assert sum(same) == 2


def test_filtered_negatives_avoid_train_edges():
    g = toy_graph(n_edges=200, n_nodes=20)
    cfg = NegativeSamplerConfig(num_negatives=3, mode="both", filtered=True)
    sampler = NegativeSampler(g, g.edges, cfg)
    negs, flags = sampler.sample(g.edges, np.random.default_rng(2))
    train = set(g.edge_keys().tolist())
    clean = ~flags.reshape(-1)
    keys = g.edge_keys(negs.reshape(-1, 3))
    assert not (set(keys[clean].tolist()) & train)


def test_saturated_slot_falls_back_and_flags():
    # both possible tails of (0, r, *) exist as train edges
    g = Graph(["a", "b"], np.zeros(2, dtype=int), ["entity"], ["r"],
              np.array([[0, 0, 1], [0, 0, 0]]))
    cfg = NegativeSamplerConfig(num_negatives=1, mode="tail", filtered=True,
                                retry_budget=20)
    sampler = NegativeSampler(g, g.edges, cfg)
    negs, flags = sampler.sample(np.array([[0, 0, 1]]), np.random.default_rng(0))
    assert flags.all()
    assert negs[0, 0, 2] == 0  # still differs from the positive's tail


def test_type_constrained_corruption_stays_in_type():
    g = bipartite_graph()
    cfg = NegativeSamplerConfig(num_negatives=4, mode="both",
                                type_constrained=True)
    sampler = NegativeSampler(g, g.edges, cfg)
    negs, _ = sampler.sample(g.edges, np.random.default_rng(3))
    for neg in negs.reshape(-1, 3):
        assert g.node_types[neg[0]] == 0  # heads stay users
        assert g.node_types[neg[2]] == 1  # tails stay items


def test_sampling_deterministic_in_seed():
    g = toy_graph()
    cfg = NegativeSamplerConfig(num_negatives=2, mode="both")
    sampler = NegativeSampler(g, g.edges, cfg)
    a, _ = sampler.sample(g.edges, np.random.default_rng(11))
    b, _ = sampler.sample(g.edges, np.random.default_rng(11))
    assert np.array_equal(a, b)
