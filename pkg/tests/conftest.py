import random

import pytest

from netmedkit.bundled import load_annotations, load_sample_graph
from netmedkit.kgstore import (EdgeRecord, NodeRecord, SchemaDescriptor,
                               graph_from_records)


@pytest.fixture(scope="session")
def sample_graph():
    return load_sample_graph()


@pytest.fixture(scope="session")
def annotations():
    return load_annotations()


PPI_SCHEMA = SchemaDescriptor(node_types=["protein"],
                              edge_types=[("ppi", "protein", "protein")])


def ppi_graph(edges, extra_nodes=()):
    """Bare protein interaction graph from an edge list of id pairs."""
    ids = sorted({n for e in edges for n in e} | set(extra_nodes))
    nodes = [NodeRecord(i, "protein", i) for i in ids]
    recs = [EdgeRecord(a, b, "ppi") for a, b in edges]
    return graph_from_records(nodes, recs, PPI_SCHEMA)


def random_ppi_graph(rng: random.Random, n_nodes: int, p_edge: float = 0.15,
                     connected: bool = True):
    ids = [f"p{i:03d}" for i in range(n_nodes)]
    edges = []
    if connected:
        order = ids[:]
        rng.shuffle(order)
        for a, b in zip(order, order[1:]):
            edges.append((a, b))
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < p_edge:
                edges.append((ids[i], ids[j]))
    return ppi_graph(edges, extra_nodes=ids)
