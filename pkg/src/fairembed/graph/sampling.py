"""Edge splitting, batching, and negative sampling."""
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .core import EdgeSplit


def split_edges(graph, ratio, seed):
    """Uniform random train/test split, deterministic in seed."""
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"split ratio must be in (0,1), got {ratio}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(graph.num_edges)
    n_train = int(round(ratio * graph.num_edges))
    return EdgeSplit(graph.edges[perm[:n_train]], graph.edges[perm[n_train:]],
                     seed, ratio)


def passthrough_split(train_edges, test_edges):
    """Wrap externally provided splits (benchmarks that ship their own)."""
    return EdgeSplit(train_edges, test_edges, seed=-1, ratio=float("nan"))


def batch_iter(edges, batch_size, rng):
    """Yield shuffled batches covering all edges; the final one may be short."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    edges = np.asarray(edges)
    perm = rng.permutation(len(edges))
    for lo in range(0, len(edges), batch_size):
        yield edges[perm[lo:lo + batch_size]]


def slot_pools(graph, edges, type_constrained):
    """Candidate node pool per (relation, slot): nodes of the types observed
    in that slot when type_constrained, otherwise every node."""
    pools = {}
    all_nodes = np.arange(graph.num_nodes)
    type_ids = {i: np.flatnonzero(graph.node_types == i)
                for i in range(len(graph.type_names))}
    edges = np.asarray(edges).reshape(-1, 3)
    for r in range(graph.num_relations):
        rows = edges[edges[:, 1] == r]
        for slot, col in (("head", 0), ("tail", 2)):
            if type_constrained and len(rows):
                seen = np.unique(graph.node_types[rows[:, col]])
                pool = np.sort(np.concatenate([type_ids[int(i)] for i in seen]))
            else:
                pool = all_nodes
            pools[(r, slot)] = pool
    return pools


@dataclass
class NegativeSamplerConfig:
    num_negatives: int = 1
    mode: str = "both"              # "head" | "tail" | "both"
    filtered: bool = False
    type_constrained: bool = False
    retry_budget: int = 100

    def __post_init__(self):
        if self.num_negatives < 1:
            raise ConfigError("num_negatives must be >= 1")
        if self.mode not in ("head", "tail", "both"):
            raise ConfigError(f"bad corruption mode {self.mode!r}")


class NegativeSampler:
    """Corrupts one slot of each positive triple.

    Candidate pools per (relation, slot) come from the node types observed
    in that slot in the training edges when type_constrained, otherwise all
    nodes. With filtered=True a corruption present in the training set is
    rejected and redrawn; after retry_budget failures the sampler falls
    back to unfiltered for that positive and flags it in the returned
    metadata.
    """

    def __init__(self, graph, train_edges, config):
        self.graph = graph
        self.config = config
        self.train_keys = set(graph.edge_keys(train_edges).tolist())
        self._pools = slot_pools(graph, train_edges, config.type_constrained)

    def _key(self, h, r, t):
        return (h * self.graph.num_relations + r) * self.graph.num_nodes + t

    def sample(self, batch, rng):
        """Returns (negatives (B, m, 3), fallback flags (B, m))."""
        batch = np.asarray(batch).reshape(-1, 3)
        n, m = len(batch), self.config.num_negatives
        if self.config.mode == "both":
            head_slot = rng.random((n, m)) < 0.5
        else:
            head_slot = np.full((n, m), self.config.mode == "head")
        if self.config.filtered:
            return self._sample_filtered(batch, head_slot, rng)
        return self._sample_unfiltered(batch, head_slot, rng), np.zeros((n, m), bool)

    def _sample_unfiltered(self, batch, head_slot, rng):
        n, m = head_slot.shape
        negs = np.repeat(batch[:, None, :], m, axis=1).reshape(-1, 3)
        flat_head = head_slot.ravel()
        for (r, slot), pool in self._pools.items():
            col = 0 if slot == "head" else 2
            rows = np.flatnonzero((negs[:, 1] == r)
                                  & (flat_head if slot == "head" else ~flat_head))
            if not len(rows):
                continue
            orig = negs[rows, col]
            cand = pool[rng.integers(len(pool), size=len(rows))]
            for _ in range(self.config.retry_budget):
                coll = cand == orig
                if not coll.any():
                    break
                cand[coll] = pool[rng.integers(len(pool), size=int(coll.sum()))]
            for i in np.flatnonzero(cand == orig):
                cand[i] = self._any_other(pool, orig[i], rng)
            negs[rows, col] = cand
        return negs.reshape(n, m, 3)

    def _sample_filtered(self, batch, head_slot, rng):
        n, m = head_slot.shape
        negs = np.empty((n, m, 3), dtype=np.int64)
        flags = np.zeros((n, m), dtype=bool)
        for i, (h, r, t) in enumerate(batch):
            for j in range(m):
                slot = "head" if head_slot[i, j] else "tail"
                pool = self._pools[(int(r), slot)]
                orig = int(h if slot == "head" else t)
                cand, fell_back = None, False
                for _ in range(self.config.retry_budget):
                    c = int(pool[rng.integers(len(pool))])
                    if c == orig:
                        continue
                    key = (self._key(c, int(r), int(t)) if slot == "head"
                           else self._key(int(h), int(r), c))
                    if key in self.train_keys:
                        continue
                    cand = c
                    break
                if cand is None:
                    cand = self._any_other(pool, orig, rng)
                    fell_back = True
                negs[i, j] = (cand, r, t) if slot == "head" else (h, r, cand)
                flags[i, j] = fell_back
        return negs, flags

    def _any_other(self, pool, orig, rng):
        others = pool[pool != orig]
        if len(others) == 0:
            others = np.arange(self.graph.num_nodes)
            others = others[others != orig]
        return int(others[rng.integers(len(others))])


def sample_negatives(batch, graph, train_edges, config, rng):
    """One-shot convenience wrapper around NegativeSampler."""
    return NegativeSampler(graph, train_edges, config).sample(batch, rng)
