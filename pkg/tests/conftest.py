from __future__ import annotations

import numpy as np
import pytest

from raddopt import Digraph, build_weight_matrix
from raddopt.canonical import canonical_digraph, canonical_objectives, canonical_x0


@pytest.fixture
def canon_graph():
    return canonical_digraph()


@pytest.fixture
def canon_P(canon_graph):
    return build_weight_matrix(canon_graph)


@pytest.fixture
def canon_objs():
    return canonical_objectives()


@pytest.fixture
def canon_x0():
    return canonical_x0()


def random_sc_digraph(rng: np.random.Generator, n: int, extra_edge_prob: float = 0.3) -> Digraph:
    """Directed ring (guarantees strong connectivity) plus random extra edges."""
    edges = {(i, (i + 1) % n) for i in range(n)}
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < extra_edge_prob:
                edges.add((u, v))
    return Digraph(n, frozenset(edges))
