from .core import AttributeTable, EdgeSplit, Graph
from .io import (derive_edge_attributes, load_attributes,
                 load_split_files, load_triples, sample_sensitive_nodes)
from .kcore import k_core, subgraph
from .sampling import (NegativeSampler, NegativeSamplerConfig, batch_iter,
                       passthrough_split, sample_negatives, slot_pools,
                       split_edges)

__all__ = [
    "AttributeTable", "EdgeSplit", "Graph", "derive_edge_attributes",
    "load_attributes", "load_split_files", "load_triples",
    "sample_sensitive_nodes", "k_core",
    "subgraph", "NegativeSampler", "NegativeSamplerConfig", "batch_iter",
    "passthrough_split", "sample_negatives", "slot_pools", "split_edges",
]
