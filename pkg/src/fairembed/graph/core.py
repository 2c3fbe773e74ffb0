"""Graph and sensitive-attribute containers. Immutable after construction."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import CompletenessError, DataError, NodeTypeError


@dataclass
class Graph:
    """Typed nodes plus directed relation triples.

    Node ids are dense integers 0..|V|-1 in first-appearance order of the
    source file; names carry identity across id re-densification.
    """
    node_names: list
    node_types: np.ndarray          # (|V|,) int, index into type_names
    type_names: list
    relation_names: list
    edges: np.ndarray               # (|E|, 3) int64 rows (head, rel, tail)

    _name_to_id: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.node_types = np.asarray(self.node_types, dtype=np.int64)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 3)
        n = len(self.node_names)
        if self.node_types.shape != (n,):
            raise DataError("node_types length does not match node_names")
        if self.edges.size:
            if self.edges[:, [0, 2]].min() < 0 or self.edges[:, [0, 2]].max() >= n:
                raise DataError("edge references an unknown node id")
            if self.edges[:, 1].min() < 0 or self.edges[:, 1].max() >= len(self.relation_names):
                raise DataError("edge references an unknown relation id")
        keys = self.edges[:, 0] * len(self.relation_names) * max(n, 1) \
            + self.edges[:, 1] * max(n, 1) + self.edges[:, 2]
        if len(np.unique(keys)) != len(keys):
            raise DataError("duplicate triples in edge list")
        if not self._name_to_id:
            self._name_to_id = {
                (int(t), s): i
                for i, (s, t) in enumerate(zip(self.node_names, self.node_types))
            }

    @property
    def num_nodes(self):
        return len(self.node_names)

    @property
    def num_relations(self):
        return len(self.relation_names)

    @property
    def num_edges(self):
        return self.edges.shape[0]

    def type_id(self, type_name):
        try:
            return self.type_names.index(type_name)
        except ValueError:
            raise NodeTypeError(f"unknown node type {type_name!r}") from None

    def nodes_of_type(self, type_name):
        return np.flatnonzero(self.node_types == self.type_id(type_name))

    def type_counts(self):
        return {t: int((self.node_types == i).sum())
                for i, t in enumerate(self.type_names)}

    def node_id(self, type_name, name):
        key = (self.type_id(type_name), name)
        if key not in self._name_to_id:
            raise KeyError(f"no node {name!r} of type {type_name!r}")
        return self._name_to_id[key]

    def degrees(self):
        """Undirected degrees: each edge endpoint counts once."""
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 2], 1)
        return deg

    def edge_keys(self, edges=None):
        """int64 key per triple, unique within this graph's vocabularies."""
        e = self.edges if edges is None else np.asarray(edges).reshape(-1, 3)
        return (e[:, 0] * self.num_relations + e[:, 1]) * self.num_nodes + e[:, 2]


@dataclass
class AttributeTable:
    """Categorical sensitive attributes, total on one node type."""
    node_type: str
    attr_names: list
    cardinalities: list
    node_ids: np.ndarray            # (n,) graph node ids of type T*
    values: np.ndarray              # (n, K) int class indices

    def __post_init__(self):
        self.node_ids = np.asarray(self.node_ids, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.int64).reshape(len(self.node_ids), -1)
        if self.num_attrs < 1:
            raise DataError("attribute table needs K >= 1 attributes")
        if len(self.cardinalities) != self.num_attrs:
            raise DataError("cardinalities length does not match K")
        for k, card in enumerate(self.cardinalities):
            col = self.values[:, k]
            if col.size and (col.min() < 0 or col.max() >= card):
                raise DataError(f"attribute {self.attr_names[k]!r} value out of range")
        self._row_of = {int(n): i for i, n in enumerate(self.node_ids)}

    @property
    def num_attrs(self):
        return self.values.shape[1]

    def row_for(self, node_ids):
        try:
            return np.array([self._row_of[int(n)] for n in np.atleast_1d(node_ids)],
                            dtype=np.int64)
        except KeyError as exc:
            raise CompletenessError(f"node {exc.args[0]} has no attributes") from None

    def values_for(self, node_ids):
        return self.values[self.row_for(node_ids)]


@dataclass
class EdgeSplit:
    train_edges: np.ndarray
    test_edges: np.ndarray
    seed: int
    ratio: float

    def __post_init__(self):
        self.train_edges = np.asarray(self.train_edges, dtype=np.int64).reshape(-1, 3)
        self.test_edges = np.asarray(self.test_edges, dtype=np.int64).reshape(-1, 3)
