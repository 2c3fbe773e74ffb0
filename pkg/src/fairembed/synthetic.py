"""Synthetic attributed bipartite graphs for demos, calibration runs, and
the end-to-end test suite.

Users carry independent binary attributes. Each item gets a +/-1 affinity
per attribute and a latent taste vector; the edge probability mixes an
attribute-driven term (so attributes are recoverable from interaction
patterns) with an attribute-free taste term (so stripping the attributes
still leaves learnable structure).
"""
import numpy as np

from .graph.core import AttributeTable, Graph


def synthetic_bipartite(n_users=2000, n_items=200, num_attrs=3, seed=0,
                        taste_dim=2, taste_weight=1.0, attr_weight=1.4,
                        base_rate=0.12):
    rng = np.random.default_rng([seed, 424242])
    attr_values = rng.integers(0, 2, size=(n_users, num_attrs))
    signs = 2.0 * attr_values - 1.0                        # (U, K) in +/-1
    item_affinity = rng.choice([-1.0, 1.0], size=(n_items, num_attrs))
    g_user = rng.normal(size=(n_users, taste_dim)) / np.sqrt(taste_dim)
    h_item = rng.normal(size=(n_items, taste_dim)) / np.sqrt(taste_dim)

    logits = (taste_weight * (g_user @ h_item.T)
              + attr_weight * (signs @ item_affinity.T) / np.sqrt(num_attrs)
              + np.log(base_rate / (1.0 - base_rate)))
    probs = 1.0 / (1.0 + np.exp(-logits))
    adj = rng.random((n_users, n_items)) < probs
    # no isolated nodes: they would drop out of raw edge files entirely
    for u in np.flatnonzero(~adj.any(axis=1)):
        adj[u, rng.integers(n_items)] = True
    for i in np.flatnonzero(~adj.any(axis=0)):
        adj[rng.integers(n_users), i] = True

    heads, tails = np.nonzero(adj)
    edges = np.column_stack([heads, np.zeros(len(heads), dtype=np.int64),
                             n_users + tails])
    names = [f"u{i}" for i in range(n_users)] + [f"i{j}" for j in range(n_items)]
    types = np.array([0] * n_users + [1] * n_items)
    graph = Graph(names, types, ["user", "item"], ["interacts"], edges)
    attrs = AttributeTable("user", [f"attr{k}" for k in range(num_attrs)],
                           [2] * num_attrs, np.arange(n_users), attr_values)
    return graph, attrs


def write_raw_files(graph, attrs, edges_path, attrs_path):
    """Materialize a graph + attribute table in the loader formats
    (bipartite-edge and node/attr/value)."""
    with open(edges_path, "w") as fh:
        for h, _, t in graph.edges:
            fh.write(f"{graph.node_names[h]}\t{graph.node_names[t]}\n")
    with open(attrs_path, "w") as fh:
        for node_id, row in zip(attrs.node_ids, attrs.values):
            for k, v in enumerate(row):
                fh.write(f"{graph.node_names[node_id]}\t"
                         f"{attrs.attr_names[k]}\t{v}\n")
