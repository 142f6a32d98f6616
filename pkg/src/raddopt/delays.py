"""Link delays and the augmented delayed digraph.

A bounded integer delay on each edge turns the delayed message-passing
system into a delay-free linear system on a larger state: each node gets a
chain of virtual nodes, one per delay level, that shift arriving mass down
toward the actual node.  The resulting matrix stays column-stochastic, so
ratio-based consensus survives the augmentation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import AnalysisError, InputError, NotStronglyConnectedError
from .graph import Digraph, unreachable_pair
from .smallmat import perron_vector


@dataclass(frozen=True)
class DelayAssignment:
    """Time-invariant nonnegative integer delay per directed edge.

    ``delays`` is total over the graph's edges (absent edges are filled with
    0 by the constructors); the implicit self-loop delay is always 0.
    ``tau_bar`` is the network-wide bound: it defaults to the realized
    maximum and may only exceed it when a dominating bound was declared
    explicitly.
    """

    delays: Mapping[tuple[int, int], int]
    tau_bar: int

    @classmethod
    def for_graph(
        cls,
        g: Digraph,
        delays: Mapping[tuple[int, int], int] | None = None,
        tau_bar: int | None = None,
    ) -> "DelayAssignment":
        given = dict(delays or {})
        for edge, tau in given.items():
            if edge not in g.edges:
                u, v = edge
                raise InputError(f"delay given for non-edge {u + 1} -> {v + 1}")
            if int(tau) != tau or tau < 0:
                raise InputError(f"delay on edge {edge[0] + 1} -> {edge[1] + 1} must be a "
                                 f"nonnegative integer, got {tau!r}")
        full = {e: int(given.get(e, 0)) for e in g.edge_list}
        realized = max(full.values(), default=0)
        if tau_bar is None:
            tau_bar = realized
        elif tau_bar < realized:
            raise InputError(
                f"declared tau_bar {tau_bar} does not dominate the maximum listed delay {realized}"
            )
        return cls(MappingProxyType(full), int(tau_bar))

    @classmethod
    def uniform(cls, g: Digraph, tau: int) -> "DelayAssignment":
        """All edges delayed by exactly ``tau``."""
        return cls.for_graph(g, {e: tau for e in g.edge_list})

    def vector(self, g: Digraph) -> np.ndarray:
        """Delays aligned with ``g.edge_list`` order."""
        return np.array([self.delays[e] for e in g.edge_list], dtype=int)


@dataclass(frozen=True)
class TimeVaryingDelaySampler:
    """Uniform iid delays in ``{0, ..., tau_star_bar}`` per edge per step.

    Sampling is a pure function of ``(seed, step, edge index)``: each step
    gets its own generator keyed on ``(seed, step)`` and edges draw by
    position, so streams are reproducible and independent of evaluation
    order across steps.
    """

    tau_star_bar: int
    seed: int

    def __post_init__(self):
        if self.tau_star_bar < 0:
            raise InputError(f"delay bound must be nonnegative, got {self.tau_star_bar}")

    def at_step(self, k: int, n_edges: int) -> np.ndarray:
        ss = np.random.SeedSequence(entropy=(int(self.seed) & (2**64 - 1), int(k)))
        rng = np.random.default_rng(ss)
        return rng.integers(0, self.tau_star_bar + 1, size=n_edges)


def load_delays(path, g: Digraph) -> DelayAssignment:
    """Parse the delay file format against a graph.

    Lines are ``delay <from> <to> <tau>`` (1-based ids, edges of ``g`` only);
    absent edges default to delay 0.  An optional ``tau_bar <value>`` header
    must dominate all listed delays.
    """
    path = Path(path)
    listed: dict[tuple[int, int], int] = {}
    declared: int | None = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "tau_bar":
            if declared is not None:
                raise InputError(f"{path}:{lineno}: duplicate 'tau_bar' line")
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'tau_bar <value>'")
            try:
                declared = int(parts[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: tau_bar {parts[1]!r} is not an integer") from None
            if declared < 0:
                raise InputError(f"{path}:{lineno}: tau_bar must be nonnegative")
        elif parts[0] == "delay":
            if len(parts) != 4:
                raise InputError(f"{path}:{lineno}: expected 'delay <from> <to> <tau>'")
            try:
                u, v, tau = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise InputError(f"{path}:{lineno}: delay fields must be integers") from None
            if not (1 <= u <= g.n and 1 <= v <= g.n):
                raise InputError(f"{path}:{lineno}: edge {u} -> {v} out of range 1..{g.n}")
            if (u - 1, v - 1) not in g.edges:
                raise InputError(f"{path}:{lineno}: {u} -> {v} is not an edge of the graph")
            if tau < 0:
                raise InputError(f"{path}:{lineno}: delay must be nonnegative, got {tau}")
            if (u - 1, v - 1) in listed:
                raise InputError(f"{path}:{lineno}: duplicate delay for edge {u} -> {v}")
            listed[(u - 1, v - 1)] = tau
        else:
            raise InputError(f"{path}:{lineno}: expected 'delay' or 'tau_bar', got {parts[0]!r}")
    if declared is not None and listed and declared < max(listed.values()):
        raise InputError(
            f"{path}: declared tau_bar {declared} does not dominate the maximum listed delay "
            f"{max(listed.values())}"
        )
    return DelayAssignment.for_graph(g, listed, tau_bar=declared)


def split_by_delay(p: np.ndarray, d: DelayAssignment) -> list[np.ndarray]:
    """Split a weight matrix into per-delay-level parts.

    Part ``r`` keeps ``p[receiver, sender]`` exactly where the edge's delay
    is ``r`` (the diagonal lands in part 0); parts sum back to ``p``
    bit-exactly because every entry goes to exactly one part.
    """
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    if p.ndim != 2 or p.shape != (n, n):
        raise InputError(f"weight matrix must be square, got shape {p.shape}")
    for (u, v) in d.delays:
        if u >= n or v >= n:
            raise InputError(
                f"delay assignment references node {max(u, v) + 1} outside a {n}-node matrix"
            )
    parts = [np.zeros((n, n)) for _ in range(d.tau_bar + 1)]
    np.fill_diagonal(parts[0], np.diag(p))
    for (u, v), tau in d.delays.items():
        parts[tau][v, u] = p[v, u]
    total = parts[0].copy()
    for part in parts[1:]:
        total += part
    if not np.array_equal(total, p):
        raise InputError("weight matrix has entries not covered by the delay assignment")
    return parts


@dataclass(frozen=True)
class AugmentedSystem:
    """The delay-free linear system over actual plus virtual nodes.

    ``slots[i]`` maps augmented index ``i`` to a ``(node, level)`` pair;
    level 0 indices coincide with the actual node ids.  ``pi`` and
    ``xi_inf = outer(pi, ones)`` are only available for pruned systems,
    where the augmented graph is strongly connected and aperiodic so the
    stationary vector is strictly positive.
    """

    xi: np.ndarray
    n: int
    tau_bar: int
    slots: tuple[tuple[int, int], ...]
    pruned: bool
    pi: np.ndarray | None
    xi_inf: np.ndarray | None

    @property
    def n_bar(self) -> int:
        return self.xi.shape[0]

    @cached_property
    def index_of(self) -> Mapping[tuple[int, int], int]:
        return MappingProxyType({slot: i for i, slot in enumerate(self.slots)})


def build_augmented(
    p: np.ndarray,
    d: DelayAssignment,
    prune: bool = True,
    *,
    perron_tol: float = 1e-12,
    perron_max_iter: int = 10**6,
) -> AugmentedSystem:
    """Assemble the augmented column-stochastic matrix for a delay assignment.

    Level-``r`` rows receive the delay-``r`` part of the weight matrix from
    the actual nodes plus an identity feed from level ``r + 1``; level 0
    rows are the actual nodes.  With ``prune`` (the default), virtual node
    ``(j, r)`` is kept only when some incoming edge of ``j`` has delay at
    least ``r`` -- nodes that could never receive mass are dropped, which is
    what keeps the stationary vector strictly positive.  Unpruned systems
    are kept for side-by-side comparison and carry no stationary vector.
    """
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    g = Digraph(n, frozenset(d.delays.keys()))
    pair = unreachable_pair(g)
    if pair is not None:
        a, b = pair
        raise NotStronglyConnectedError(
            f"augmentation requires a strongly connected graph: no directed walk from "
            f"node {a + 1} to node {b + 1} (1-based ids)"
        )
    parts = split_by_delay(p, d)
    max_in = [0] * n
    for (u, v), tau in d.delays.items():
        max_in[v] = max(max_in[v], tau)
    levels = max_in if prune else [d.tau_bar] * n
    slots: list[tuple[int, int]] = [(j, 0) for j in range(n)]
    for r in range(1, d.tau_bar + 1):
        for j in range(n):
            if levels[j] >= r:
                slots.append((j, r))
    index_of = {slot: i for i, slot in enumerate(slots)}
    n_bar = len(slots)
    xi = np.zeros((n_bar, n_bar))
    for r, part in enumerate(parts):
        rows, cols = np.nonzero(part)
        for j, i in zip(rows, cols):
            xi[index_of[(int(j), r)], int(i)] = part[j, i]
    for (j, r) in slots:
        if r >= 1:
            xi[index_of[(j, r - 1)], index_of[(j, r)]] = 1.0
    pi = xi_inf = None
    if prune:
        pi = perron_vector(xi, tol=perron_tol, max_iter=perron_max_iter)
        if pi.min() <= 0.0:
            raise AnalysisError(
                "pruned augmented system produced a nonpositive stationary entry; "
                "pruning is inconsistent with the delay assignment"
            )
        xi_inf = np.outer(pi, np.ones(n_bar))
    return AugmentedSystem(
        xi=xi, n=n, tau_bar=d.tau_bar, slots=tuple(slots), pruned=prune, pi=pi, xi_inf=xi_inf
    )
