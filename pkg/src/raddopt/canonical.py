"""The bundled five-node example used by the experiment suite and tests.

Topology: a directed ring 1>2>3>4>5>1 with chords 1>3, 3>5 and 4>2.
Out-degrees are heterogeneous (2, 1, 2, 2, 1), so the weight matrix is
column- but not doubly stochastic and the ratio mechanism does real work.

Delay family, parameterized by the network bound ``tau_bar``: the ring link
4>5 carries ``tau_bar`` and the chord 3>5 carries ``min(tau_bar, 2)``; all
other links are undelayed.  Node 5 keeps receiving within three steps, so
the measured mass bounds stay tame, and the contraction factor grows
strictly with ``tau_bar`` while leaving a usable guaranteed step-size
range.  (With every link delayed by ``tau_bar`` instead, the contraction
factor crowds 1 so fast that no step size inside the guaranteed range can
reach a 1e-8 residual in a few thousand iterations.)

Objectives and start values: quadratics with curvatures ``[1 5 3 4 1]`` and
demands ``[4 1 5 2 3]``; runs start each node at its own demand.  The
closed-form optimum is 35/14 = 2.5.

The suite pins the stability constants to the example's reference set
(``ANALYSIS_OVERRIDES``): ``c = d = L = 1``, ``mu = 0.1``, ``y = 1.67``,
``y_tilde = 3``, ``epsilon = 1.1``, ``xi = 1.13``; only the contraction
factor and the augmented node count are measured per delay bound.  Derived
constants remain available but are extremely conservative: a delayed
in-neighborhood makes the measured inverse-mass bound grow geometrically
in the delay, collapsing the guaranteed range far below anything that can
converge in a bounded iteration budget.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .delays import DelayAssignment
from .graph import Digraph
from .objectives import QuadraticObjective

EDGES_1BASED = ((1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 3), (3, 5), (4, 2))

CURVATURES = (1.0, 5.0, 3.0, 4.0, 1.0)
DEMANDS = (4.0, 1.0, 5.0, 2.0, 3.0)

DELAY_TAUS = (0, 2, 5, 10)

ANALYSIS_OVERRIDES = {
    "c": 1.0,
    "d": 1.0,
    "L": 1.0,
    "mu": 0.1,
    "y": 1.67,
    "y_tilde": 3.0,
    "epsilon": 1.1,
    "xi": 1.13,
}


def canonical_digraph() -> Digraph:
    return Digraph(5, frozenset((u - 1, v - 1) for u, v in EDGES_1BASED))


def canonical_objectives() -> list[QuadraticObjective]:
    return [QuadraticObjective(beta=b, phi=p) for b, p in zip(CURVATURES, DEMANDS)]


def canonical_x0() -> np.ndarray:
    """Start values: each node begins at its own demand."""
    return np.array(DEMANDS)


def canonical_delay_pattern(tau_bar: int) -> dict[tuple[int, int], int]:
    """0-based delay map of the bundled family for a given bound."""
    if tau_bar < 0:
        raise ValueError(f"delay bound must be nonnegative, got {tau_bar}")
    pattern = {}
    if tau_bar > 0:
        pattern[(3, 4)] = tau_bar
        pattern[(2, 4)] = min(tau_bar, 2)
    return pattern


def canonical_delays(tau_bar: int) -> DelayAssignment:
    return DelayAssignment.for_graph(canonical_digraph(), canonical_delay_pattern(tau_bar))


def write_canonical_files(directory) -> dict[str, Path]:
    """Emit the example as text files; returns name -> path.

    Writes ``graph.txt``, ``objectives.txt`` and one ``delays_tau<k>.txt``
    per bundled delay bound.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    lines = ["# bundled five-node example: ring plus chords 1>3, 3>5, 4>2", "nodes 5"]
    lines += [f"edge {u} {v}" for u, v in EDGES_1BASED]
    paths["graph"] = directory / "graph.txt"
    paths["graph"].write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = ["# quadratic costs: quad <node> <curvature> <demand>"]
    lines += [
        f"quad {j + 1} {b:g} {p:g}" for j, (b, p) in enumerate(zip(CURVATURES, DEMANDS))
    ]
    paths["objectives"] = directory / "objectives.txt"
    paths["objectives"].write_text("\n".join(lines) + "\n", encoding="utf-8")

    for tau in DELAY_TAUS:
        lines = [f"# bundled delay family at bound {tau}", f"tau_bar {tau}"]
        for (u, v), t in sorted(canonical_delay_pattern(tau).items()):
            lines.append(f"delay {u + 1} {v + 1} {t}")
        path = directory / f"delays_tau{tau}.txt"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths[f"delays_tau{tau}"] = path
    return paths
