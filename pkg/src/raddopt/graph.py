"""Directed graphs, connectivity checks, and the column-stochastic
consensus weight matrix.

Node ids are 0-based throughout the API.  The text file format
(``nodes`` / ``edge`` lines) uses 1-based ids and the loader converts at the
boundary.  An edge ``(u, v)`` means information flows from sender ``u`` to
receiver ``v``; self-loops are implicit and never stored.  Weight matrices
are indexed ``P[receiver, sender]``, so column ``j`` holds the weights node
``j`` assigns to its outgoing links (plus its own), which is what makes the
matrix column-stochastic with only out-degree knowledge.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import InputError, NotStronglyConnectedError


@dataclass(frozen=True)
class Digraph:
    """Immutable directed graph with implicit self-loops.

    Invariants enforced at construction: no stored self-loops, no duplicate
    edges (``edges`` is a set), all endpoints in ``range(n)``.
    """

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"node count must be positive, got {self.n}")
        object.__setattr__(self, "edges", frozenset(self.edges))
        for u, v in self.edges:
            if u == v:
                raise InputError(
                    f"self-loop at node {u + 1} must not be stored; self-loops are implicit"
                )
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge ({u}, {v}) out of range for n={self.n}")

    @cached_property
    def edge_list(self) -> tuple[tuple[int, int], ...]:
        """Edges in canonical sorted order; delay vectors are indexed by it."""
        return tuple(sorted(self.edges))

    @cached_property
    def out_neighbors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edge_list:
            out[u].append(v)
        return tuple(tuple(vs) for vs in out)

    @cached_property
    def in_neighbors(self) -> tuple[tuple[int, ...], ...]:
        inn: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edge_list:
            inn[v].append(u)
        return tuple(tuple(us) for us in inn)


def out_degree(g: Digraph, j: int) -> int:
    """Number of stored outgoing edges of node ``j`` (implicit self-loop excluded)."""
    if not isinstance(j, (int, np.integer)) or not (0 <= j < g.n):
        raise ValueError(f"invalid node id {j!r} for a graph with {g.n} nodes")
    return len(g.out_neighbors[j])


def _reachable(adj, start: int, n: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def unreachable_pair(g: Digraph) -> tuple[int, int] | None:
    """Some pair ``(a, b)`` with no directed walk from a to b, or None.

    A digraph is strongly connected iff node 0 reaches every node and every
    node reaches node 0, so two traversals suffice.
    """
    if g.n == 1:
        return None
    fwd = _reachable(g.out_neighbors, 0, g.n)
    for v in range(g.n):
        if v not in fwd:
            return (0, v)
    bwd = _reachable(g.in_neighbors, 0, g.n)
    for v in range(g.n):
        if v not in bwd:
            return (v, 0)
    return None


def is_strongly_connected(g: Digraph) -> bool:
    """True iff every node reaches every other node by a directed walk."""
    return unreachable_pair(g) is None


def build_weight_matrix(g: Digraph) -> np.ndarray:
    """Column-stochastic weights: sender ``j`` puts ``1/(1 + out_degree(j))``
    on each outgoing link and on itself.

    Rejects graphs that are not strongly connected, naming an unreachable
    pair.  The construction is deterministic: identical graphs yield
    bit-identical matrices.
    """
    pair = unreachable_pair(g)
    if pair is not None:
        a, b = pair
        raise NotStronglyConnectedError(
            f"graph is not strongly connected: no directed walk from node {a + 1} "
            f"to node {b + 1} (1-based ids)"
        )
    p = np.zeros((g.n, g.n))
    for j in range(g.n):
        w = 1.0 / (1.0 + len(g.out_neighbors[j]))
        p[j, j] = w
        for v in g.out_neighbors[j]:
            p[v, j] = w
    return p


def load_digraph(path) -> Digraph:
    """Parse the line-oriented graph format.

    ``nodes <n>`` first, then ``edge <from> <to>`` lines with 1-based ids.
    Lines starting with ``#`` are comments; blank lines are ignored.
    """
    path = Path(path)
    n: int | None = None
    edges: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "nodes":
            if n is not None:
                raise InputError(f"{path}:{lineno}: duplicate 'nodes' line")
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'nodes <n>'")
            try:
                n = int(parts[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: node count {parts[1]!r} is not an integer") from None
            if n < 1:
                raise InputError(f"{path}:{lineno}: node count must be positive, got {n}")
        elif parts[0] == "edge":
            if n is None:
                raise InputError(f"{path}:{lineno}: 'edge' before 'nodes' line")
            if len(parts) != 3:
                raise InputError(f"{path}:{lineno}: expected 'edge <from> <to>'")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise InputError(f"{path}:{lineno}: edge endpoints must be integers") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise InputError(f"{path}:{lineno}: edge {u} -> {v} out of range 1..{n}")
            if u == v:
                raise InputError(f"{path}:{lineno}: self-loop {u} -> {v}; self-loops are implicit")
            if (u - 1, v - 1) in edges:
                raise InputError(f"{path}:{lineno}: duplicate edge {u} -> {v}")
            edges.add((u - 1, v - 1))
        else:
            raise InputError(f"{path}:{lineno}: expected 'nodes' or 'edge', got {parts[0]!r}")
    if n is None:
        raise InputError(f"{path}: missing 'nodes' header line")
    return Digraph(n, frozenset(edges))
