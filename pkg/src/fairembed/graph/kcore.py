"""k-core extraction by iterative peeling."""
import numpy as np

from .core import Graph


def subgraph(graph, keep_ids):
    """Induced subgraph on keep_ids with re-densified node ids.

    Names are preserved, so the old->new mapping is recoverable by name.
    """
    keep_ids = np.asarray(keep_ids, dtype=np.int64)
    new_of = np.full(graph.num_nodes, -1, dtype=np.int64)
    new_of[keep_ids] = np.arange(len(keep_ids))
    mask = (new_of[graph.edges[:, 0]] >= 0) & (new_of[graph.edges[:, 2]] >= 0)
    edges = graph.edges[mask].copy()
    edges[:, 0] = new_of[edges[:, 0]]
    edges[:, 2] = new_of[edges[:, 2]]
    return Graph([graph.node_names[i] for i in keep_ids],
                 graph.node_types[keep_ids].copy(),
                 list(graph.type_names), list(graph.relation_names), edges)


def k_core(graph, k):
    """Maximal subgraph where every node has undirected degree >= k.

    Peels iteratively with a worklist; an empty result is valid. Each edge
    endpoint contributes one degree (a self-loop contributes two).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    deg = graph.degrees()
    alive = np.ones(graph.num_nodes, dtype=bool)
    # adjacency as flat neighbor lists
    heads, tails = graph.edges[:, 0], graph.edges[:, 2]
    order = np.argsort(np.concatenate([heads, tails]), kind="stable")
    nbrs = np.concatenate([tails, heads])[order]
    ends = np.concatenate([heads, tails])[order]
    starts = np.searchsorted(ends, np.arange(graph.num_nodes + 1))

    stack = list(np.flatnonzero(deg < k))
    for u in stack:
        alive[u] = False
    while stack:
        u = stack.pop()
        for v in nbrs[starts[u]:starts[u + 1]]:
            if alive[v]:
                deg[v] -= 1
                if deg[v] < k:
                    alive[v] = False
                    stack.append(v)
    return subgraph(graph, np.flatnonzero(alive))
