"""Local objective functions with gradient oracles.

The shipped family is the quadratic resource-allocation cost
``0.5 * beta * (z - phi)**2`` with demand ``phi`` and curvature ``beta``;
its global minimizer has a closed form, which is what the simulators use
as the convergence target.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError


class LocalObjective(abc.ABC):
    """Scalar local cost with a gradient oracle and curvature constants.

    Implementations declare a Lipschitz constant for the gradient and a
    strong-convexity constant, with ``strong_convexity <= lipschitz``.
    """

    @property
    @abc.abstractmethod
    def lipschitz(self) -> float: ...

    @property
    @abc.abstractmethod
    def strong_convexity(self) -> float: ...

    @abc.abstractmethod
    def value(self, z: float) -> float: ...

    @abc.abstractmethod
    def gradient(self, z: float) -> float: ...


@dataclass(frozen=True)
class QuadraticObjective(LocalObjective):
    """``0.5 * beta * (z - phi)**2`` with gradient ``beta * (z - phi)``."""

    beta: float
    phi: float

    def __post_init__(self):
        if not (self.beta > 0) or not np.isfinite(self.beta):
            raise ValueError(f"curvature must be positive, got {self.beta!r}")
        if not np.isfinite(self.phi):
            raise ValueError(f"demand must be finite, got {self.phi!r}")

    @property
    def lipschitz(self) -> float:
        return self.beta

    @property
    def strong_convexity(self) -> float:
        return self.beta

    def value(self, z: float) -> float:
        return 0.5 * self.beta * (z - self.phi) ** 2

    def gradient(self, z: float) -> float:
        return self.beta * (z - self.phi)


def closed_form_minimizer(objectives: Sequence[QuadraticObjective]) -> float:
    """Minimizer of the summed quadratic costs: weighted demand average."""
    objs = list(objectives)
    if not objs:
        raise ValueError("at least one objective is required")
    for o in objs:
        if not isinstance(o, QuadraticObjective):
            raise TypeError(f"closed form needs quadratic objectives, got {type(o).__name__}")
        if not (o.beta > 0):
            raise ValueError("curvatures must be positive")
    total = sum(o.beta for o in objs)
    return sum(o.beta * o.phi for o in objs) / total


def aggregate_constants(objectives: Iterable[LocalObjective]) -> tuple[float, float]:
    """Network-wide (max Lipschitz, min strong-convexity) pair."""
    objs = list(objectives)
    if not objs:
        raise ValueError("at least one objective is required")
    return (max(o.lipschitz for o in objs), min(o.strong_convexity for o in objs))


def gradient_vector(objectives: Sequence[LocalObjective], z: np.ndarray) -> np.ndarray:
    """Per-node gradients evaluated at per-node points."""
    return np.array([o.gradient(float(zi)) for o, zi in zip(objectives, z)])


def load_objectives(path, n: int) -> list[QuadraticObjective]:
    """Parse ``quad <node-id> <beta> <phi>`` lines; every node exactly once."""
    path = Path(path)
    by_node: dict[int, QuadraticObjective] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] != "quad":
            raise InputError(f"{path}:{lineno}: expected 'quad <node-id> <beta> <phi>'")
        if len(parts) != 4:
            raise InputError(f"{path}:{lineno}: expected 'quad <node-id> <beta> <phi>'")
        try:
            node = int(parts[1])
            beta = float(parts[2])
            phi = float(parts[3])
        except ValueError:
            raise InputError(f"{path}:{lineno}: malformed numeric fields") from None
        if not (1 <= node <= n):
            raise InputError(f"{path}:{lineno}: node id {node} out of range 1..{n}")
        if node in by_node:
            raise InputError(f"{path}:{lineno}: duplicate objective for node {node}")
        if beta <= 0:
            raise InputError(f"{path}:{lineno}: curvature must be positive, got {beta}")
        by_node[node] = QuadraticObjective(beta=beta, phi=phi)
    missing = [str(j) for j in range(1, n + 1) if j not in by_node]
    if missing:
        raise InputError(f"{path}: missing objectives for nodes {', '.join(missing)}")
    return [by_node[j] for j in range(1, n + 1)]
