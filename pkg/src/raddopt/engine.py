"""Execution engines: per-node message passing and the augmented
matrix-vector iteration, plus trace recording.

Both engines run synchronous rounds.  A payload sent at step ``k`` over a
link with delay ``tau`` is consumed by the update that produces state
``k + 1 + tau`` (instantly, for ``tau = 0``); a node's own contribution is
always instantaneous.  The gradient-tracking state ``w`` starts at the
local gradient and is updated with gradient differences, so the column sum
of ``w`` always equals the sum of current local gradients.

The per-node x-update exists in three interpretations:

- ``own-w-once``: each node subtracts only its own gradient-tracking term,
  once.  This is the variant that reduces exactly to the undelayed
  algorithm when all delays are zero (the default).
- ``literal-eq4``: delayed neighbor w terms are subtracted raw (unweighted)
  in addition to the node's own term, which appears twice.  Kept for
  side-by-side comparison; it does not reduce to the undelayed algorithm.
- ``matrix-consistent``: per-receiver delay-line buffers with the
  subtraction applied at every level, which reproduces the augmented
  matrix iteration exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .delays import AugmentedSystem, DelayAssignment, TimeVaryingDelaySampler
from .errors import DivergenceError
from .graph import Digraph
from .objectives import LocalObjective, gradient_vector

DIVERGENCE_LIMIT = 1e12

INTERPRETATIONS = ("own-w-once", "literal-eq4", "matrix-consistent")


def residual(z_values, x_star: float) -> float:
    """Mean squared deviation of node decision values from the optimum."""
    z = np.asarray(z_values, dtype=float)
    if z.size < 1:
        raise ValueError("residual needs at least one node value")
    return float(np.mean((z - x_star) ** 2))


@dataclass
class Trace:
    """Per-step record of a run.

    ``z`` has one row per step starting at step 0; ``residuals`` is aligned
    with it.  ``augmented`` optionally carries the full stacked vectors of a
    matrix-engine run (keys ``x``, ``y``, ``w``, ``z``).
    """

    z: np.ndarray
    residuals: np.ndarray
    meta: dict = field(default_factory=dict)
    augmented: dict[str, np.ndarray] | None = None

    @property
    def steps(self) -> int:
        return len(self.residuals) - 1

    @property
    def converged(self) -> bool:
        return bool(self.meta.get("converged", False))

    def to_csv(self, path) -> None:
        """Write ``k,residual,z_1,...,z_n`` rows, floats at 17 significant digits."""
        n = self.z.shape[1]
        lines = ["k,residual," + ",".join(f"z_{i + 1}" for i in range(n))]
        for k in range(len(self.residuals)):
            cells = [str(k), format(self.residuals[k], ".17g")]
            cells.extend(format(v, ".17g") for v in self.z[k])
            lines.append(",".join(cells))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _delay_source(graph: Digraph, delays):
    """Normalize a delay model into (bound, per-step delay vector fn, label)."""
    m = len(graph.edge_list)
    if isinstance(delays, TimeVaryingDelaySampler):
        label = f"time-varying(bound={delays.tau_star_bar}, seed={delays.seed})"
        return delays.tau_star_bar, (lambda k: delays.at_step(k, m)), label
    if isinstance(delays, DelayAssignment):
        vec = delays.vector(graph)
        return int(delays.tau_bar), (lambda k: vec), f"fixed(tau_bar={delays.tau_bar})"
    raise TypeError(f"unsupported delay model {type(delays).__name__}")


def _check_guard(step: int, *arrays: np.ndarray) -> None:
    for arr in arrays:
        finite = np.isfinite(arr)
        if not finite.all():
            raise DivergenceError(step, float("inf"))
        peak = float(np.max(np.abs(arr)))
        if peak > DIVERGENCE_LIMIT:
            raise DivergenceError(step, peak)


def _record(trace_z: list, trace_res: list, z: np.ndarray, x_star: float) -> float:
    r = residual(z, x_star)
    trace_z.append(z.copy())
    trace_res.append(r)
    return r


def _finish(trace_z, trace_res, meta, tol, augmented=None) -> Trace:
    meta = dict(meta)
    meta["converged"] = tol is not None and trace_res[-1] <= tol
    meta["final_residual"] = trace_res[-1]
    return Trace(
        z=np.vstack(trace_z),
        residuals=np.array(trace_res),
        meta=meta,
        augmented=augmented,
    )


def run_ratio_consensus(
    graph: Digraph,
    p: np.ndarray,
    delays,
    x0,
    max_iter: int,
    tol: float | None = None,
) -> Trace:
    """Two parallel linear iterations whose ratio converges to the average
    of the initial values despite bounded (possibly time-varying) delays.

    Each sent packet is consumed exactly once at its arrival step, so mass
    is conserved and the ratio of the two states at every actual node tends
    to ``mean(x0)``.
    """
    x = np.array(x0, dtype=float)
    n = graph.n
    if x.shape != (n,):
        raise ValueError(f"x0 must have one entry per node, got shape {x.shape}")
    tau, delays_at, delay_label = _delay_source(graph, delays)
    x_star = float(np.mean(x))
    pdiag = np.diag(p).copy()
    y = np.ones(n)
    z = x / y
    slots = tau + 2
    buf = np.zeros((slots, n, 2))
    trace_z: list[np.ndarray] = []
    trace_res: list[float] = []
    meta = {"algorithm": "ratio-consensus", "x_star": x_star, "tol": tol,
            "delays": delay_label}
    r = _record(trace_z, trace_res, z, x_star)
    for k in range(max_iter):
        if tol is not None and r <= tol:
            break
        d = delays_at(k)
        for e, (u, v) in enumerate(graph.edge_list):
            slot = (k + 1 + int(d[e])) % slots
            w = p[v, u]
            buf[slot, v, 0] += w * x[u]
            buf[slot, v, 1] += w * y[u]
        arrived = buf[(k + 1) % slots].copy()
        buf[(k + 1) % slots] = 0.0
        x = pdiag * x + arrived[:, 0]
        y = pdiag * y + arrived[:, 1]
        assert y.min() > 0.0, "auxiliary mass vanished at an actual node"
        z = x / y
        _check_guard(k + 1, x, y)
        r = _record(trace_z, trace_res, z, x_star)
    return _finish(trace_z, trace_res, meta, tol)


def run_gradient_tracking(
    p: np.ndarray,
    objectives: list[LocalObjective],
    alpha: float,
    x0,
    *,
    x_star: float,
    max_iter: int,
    tol: float | None = None,
) -> Trace:
    """Delay-free accelerated iteration on a column-stochastic matrix.

    The reference dense form: ``x <- P x - alpha w``, ``y <- P y``,
    ``z = x / y``, ``w <- P w + grad(z_new) - grad(z_old)``.
    """
    if alpha <= 0:
        raise ValueError(f"step size must be positive, got {alpha}")
    x = np.array(x0, dtype=float)
    y = np.ones_like(x)
    z = x / y
    g = gradient_vector(objectives, z)
    w = g.copy()
    trace_z: list[np.ndarray] = []
    trace_res: list[float] = []
    meta = {"algorithm": "add-opt", "alpha": alpha, "x_star": x_star, "tol": tol}
    r = _record(trace_z, trace_res, z, x_star)
    for k in range(max_iter):
        if tol is not None and r <= tol:
            break
        x = p @ x - alpha * w
        y = p @ y
        z = x / y
        g_new = gradient_vector(objectives, z)
        w = p @ w + g_new - g
        g = g_new
        _check_guard(k + 1, x, w)
        r = _record(trace_z, trace_res, z, x_star)
    return _finish(trace_z, trace_res, meta, tol)


def run_message_passing(
    graph: Digraph,
    p: np.ndarray,
    delays,
    objectives: list[LocalObjective],
    alpha: float,
    x0,
    *,
    x_star: float,
    max_iter: int,
    tol: float | None = None,
    interpretation: str = "own-w-once",
) -> Trace:
    """One synchronous delayed round per step at the node level.

    Every node scales its current states by its column weight and schedules
    them on each outgoing link with that link's delay; arrivals are summed
    into the update that produces the next state.  ``interpretation``
    selects the x-update variant (see module docstring).
    """
    if alpha <= 0:
        raise ValueError(f"step size must be positive, got {alpha}")
    if interpretation not in INTERPRETATIONS:
        raise ValueError(f"unknown interpretation {interpretation!r}; choose from {INTERPRETATIONS}")
    if interpretation == "matrix-consistent":
        return _run_mp_buffers(
            graph, p, delays, objectives, alpha, x0,
            x_star=x_star, max_iter=max_iter, tol=tol,
        )
    x = np.array(x0, dtype=float)
    n = graph.n
    tau, delays_at, delay_label = _delay_source(graph, delays)
    pdiag = np.diag(p).copy()
    y = np.ones(n)
    z = x / y
    g = gradient_vector(objectives, z)
    w = g.copy()
    slots = tau + 2
    buf = np.zeros((slots, n, 4))  # weighted x, y, w sums plus raw w sums
    trace_z: list[np.ndarray] = []
    trace_res: list[float] = []
    meta = {
        "algorithm": "radd-opt-mp",
        "interpretation": interpretation,
        "alpha": alpha,
        "x_star": x_star,
        "tol": tol,
        "delays": delay_label,
    }
    r = _record(trace_z, trace_res, z, x_star)
    for k in range(max_iter):
        if tol is not None and r <= tol:
            break
        d = delays_at(k)
        for e, (u, v) in enumerate(graph.edge_list):
            slot = (k + 1 + int(d[e])) % slots
            wgt = p[v, u]
            buf[slot, v, 0] += wgt * x[u]
            buf[slot, v, 1] += wgt * y[u]
            buf[slot, v, 2] += wgt * w[u]
            buf[slot, v, 3] += w[u]
        arrived = buf[(k + 1) % slots].copy()
        buf[(k + 1) % slots] = 0.0
        if interpretation == "own-w-once":
            x_new = pdiag * x + arrived[:, 0] - alpha * w
        else:  # literal-eq4: raw neighbor terms plus the own term twice
            x_new = pdiag * x + arrived[:, 0] - alpha * (arrived[:, 3] + w) - alpha * w
        y_new = pdiag * y + arrived[:, 1]
        assert y_new.min() > 0.0, "auxiliary mass vanished at an actual node"
        z_new = x_new / y_new
        g_new = gradient_vector(objectives, z_new)
        w = pdiag * w + arrived[:, 2] + g_new - g
        x, y, z, g = x_new, y_new, z_new, g_new
        _check_guard(k + 1, x, w)
        r = _record(trace_z, trace_res, z, x_star)
    return _finish(trace_z, trace_res, meta, tol)


def _run_mp_buffers(graph, p, delays, objectives, alpha, x0, *, x_star, max_iter, tol):
    """Message passing with per-receiver delay-line buffers.

    Column 0 of each buffer holds the actual node states; column ``r`` holds
    mass arriving in ``r`` more steps.  The step-size term is subtracted at
    every level, mirroring the augmented matrix iteration entry for entry.
    """
    x0 = np.array(x0, dtype=float)
    n = graph.n
    tau, delays_at, delay_label = _delay_source(graph, delays)
    pdiag = np.diag(p).copy()
    width = tau + 1
    bx = np.zeros((n, width))
    by = np.zeros((n, width))
    bw = np.zeros((n, width))
    bx[:, 0] = x0
    by[:, 0] = 1.0
    z = x0.copy()
    g = gradient_vector(objectives, z)
    bw[:, 0] = g
    trace_z: list[np.ndarray] = []
    trace_res: list[float] = []
    meta = {
        "algorithm": "radd-opt-mp",
        "interpretation": "matrix-consistent",
        "alpha": alpha,
        "x_star": x_star,
        "tol": tol,
        "delays": delay_label,
    }
    r = _record(trace_z, trace_res, z, x_star)
    pad = np.zeros((n, 1))
    for k in range(max_iter):
        if tol is not None and r <= tol:
            break
        d = delays_at(k)
        inj_x = np.zeros((n, width))
        inj_y = np.zeros((n, width))
        inj_w = np.zeros((n, width))
        inj_x[:, 0] = pdiag * bx[:, 0]
        inj_y[:, 0] = pdiag * by[:, 0]
        inj_w[:, 0] = pdiag * bw[:, 0]
        for e, (u, v) in enumerate(graph.edge_list):
            rr = int(d[e])
            wgt = p[v, u]
            inj_x[v, rr] += wgt * bx[u, 0]
            inj_y[v, rr] += wgt * by[u, 0]
            inj_w[v, rr] += wgt * bw[u, 0]
        bx_new = inj_x + np.hstack([bx[:, 1:], pad]) - alpha * bw
        by_new = inj_y + np.hstack([by[:, 1:], pad])
        bw_new = inj_w + np.hstack([bw[:, 1:], pad])
        assert by_new[:, 0].min() > 0.0, "auxiliary mass vanished at an actual node"
        z_new = bx_new[:, 0] / by_new[:, 0]
        g_new = gradient_vector(objectives, z_new)
        bw_new[:, 0] += g_new - g
        bx, by, bw, z, g = bx_new, by_new, bw_new, z_new, g_new
        _check_guard(k + 1, bx, bw)
        r = _record(trace_z, trace_res, z, x_star)
    return _finish(trace_z, trace_res, meta, tol)


def run_matrix(
    aug: AugmentedSystem,
    objectives: list[LocalObjective],
    alpha: float,
    x0,
    *,
    x_star: float,
    max_iter: int,
    tol: float | None = None,
    record_augmented: bool = False,
) -> Trace:
    """The stacked iteration on the augmented system.

    ``x <- Xi x - alpha w`` and ``w <- Xi w + grad_new - grad_old`` over all
    actual and virtual coordinates; ratio entries with zero auxiliary mass
    are set to 0 and never reach a gradient (virtual gradient entries are
    identically zero).
    """
    if alpha <= 0:
        raise ValueError(f"step size must be positive, got {alpha}")
    x0 = np.array(x0, dtype=float)
    n = aug.n
    n_bar = aug.n_bar
    if x0.shape != (n,):
        raise ValueError(f"x0 must have one entry per actual node, got shape {x0.shape}")
    xi = aug.xi
    xhat = np.zeros(n_bar)
    xhat[:n] = x0
    yhat = np.zeros(n_bar)
    yhat[:n] = 1.0
    zhat = np.zeros(n_bar)
    zhat[:n] = x0
    ghat = np.zeros(n_bar)
    ghat[:n] = gradient_vector(objectives, zhat[:n])
    what = ghat.copy()
    trace_z: list[np.ndarray] = []
    trace_res: list[float] = []
    aug_rec: dict[str, list[np.ndarray]] | None = None
    if record_augmented:
        aug_rec = {"x": [xhat.copy()], "y": [yhat.copy()], "w": [what.copy()], "z": [zhat.copy()]}
    meta = {
        "algorithm": "radd-opt-matrix",
        "alpha": alpha,
        "x_star": x_star,
        "tol": tol,
        "n_bar": n_bar,
        "delays": f"fixed(tau_bar={aug.tau_bar})",
    }
    r = _record(trace_z, trace_res, zhat[:n], x_star)
    for k in range(max_iter):
        if tol is not None and r <= tol:
            break
        xhat = xi @ xhat - alpha * what
        yhat = xi @ yhat
        zhat = np.divide(xhat, yhat, out=np.zeros(n_bar), where=(yhat != 0.0))
        assert yhat[:n].min() > 0.0, "auxiliary mass vanished at an actual node"
        g_new = np.zeros(n_bar)
        g_new[:n] = gradient_vector(objectives, zhat[:n])
        what = xi @ what + g_new - ghat
        ghat = g_new
        _check_guard(k + 1, xhat, what)
        if aug_rec is not None:
            aug_rec["x"].append(xhat.copy())
            aug_rec["y"].append(yhat.copy())
            aug_rec["w"].append(what.copy())
            aug_rec["z"].append(zhat.copy())
        r = _record(trace_z, trace_res, zhat[:n], x_star)
    stacked = None
    if aug_rec is not None:
        stacked = {key: np.vstack(rows) for key, rows in aug_rec.items()}
    return _finish(trace_z, trace_res, meta, tol, augmented=stacked)
