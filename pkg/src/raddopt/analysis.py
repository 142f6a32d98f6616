"""Convergence constants, contraction factor, the guaranteed step-size
range, and spectral-radius sweeps.

The stability argument bounds three error norms with a 3x3 nonnegative
matrix ``G(alpha)``; its spectral radius dips below one exactly when the
step size is inside ``(0, alpha_bar)``, and the best guaranteed rate is the
grid point minimizing the radius.  The contraction factor ``sigma`` is
measured on the augmented matrix, preferring the one-step weighted-norm
factor and falling back to the asymptotic (second eigenvalue) factor where
delay chains make one-step contraction impossible; see
:func:`compute_sigma`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .delays import AugmentedSystem
from .errors import AnalysisError
from .objectives import LocalObjective, aggregate_constants
from .smallmat import (
    singular_values,
    spectral_norm,
    spectral_radius_3x3,
    spectral_radius_by_squaring,
)

OVERRIDE_KEYS = ("c", "d", "L", "mu", "y", "y_tilde", "epsilon", "xi")


@dataclass(frozen=True)
class ConvergenceConstants:
    """Scalars feeding the 3x3 stability matrix and the step-size bound.

    ``y_sup`` and ``y_tilde`` bound the auxiliary-mass diagonal and its
    inverse over the run; ``epsilon`` and ``xi_norm`` are the spectral norms
    of ``I - Xi_inf`` and ``Xi - I``; ``c`` and ``d`` are norm-equivalence
    constants (1 unless supplied).
    """

    sigma: float
    epsilon: float
    xi_norm: float
    y_sup: float
    y_tilde: float
    L: float
    mu: float
    n_bar: int
    c: float = 1.0
    d: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.sigma < 1.0):
            raise AnalysisError(f"contraction factor must be in [0, 1), got {self.sigma}")
        for name in ("epsilon", "xi_norm", "y_sup", "y_tilde", "L", "mu", "c", "d"):
            value = getattr(self, name)
            if not (value > 0) or not math.isfinite(value):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.mu > self.L:
            raise ValueError(f"strong convexity {self.mu} exceeds Lipschitz constant {self.L}")
        if self.n_bar < 1:
            raise ValueError(f"augmented node count must be positive, got {self.n_bar}")

    def eta(self, alpha: float) -> float:
        """max(|1 - n_bar*alpha*L|, |1 - n_bar*alpha*mu|): the contraction of
        the averaged gradient step."""
        zeta = abs(1.0 - self.n_bar * alpha * self.L)
        chi = abs(1.0 - self.n_bar * alpha * self.mu)
        return max(zeta, chi)


def weighted_norm(a, v) -> float:
    """Euclidean norm of ``a`` rescaled entrywise by ``1/sqrt(v)``."""
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    if a.shape != v.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {v.shape}")
    if np.any(v <= 0):
        raise ValueError("weights must be positive")
    return float(np.sqrt(np.sum(a * a / v)))


def contraction_singular_value(aug: AugmentedSystem) -> float:
    """Second-largest singular value of the similarity-transformed matrix.

    This is the per-step contraction factor of the stationary-weighted
    Euclidean norm.  For any augmentation containing a pass-through delay
    level (a virtual node fed only by the level above it) the value is
    exactly 1: a delay line shifts mass without shrinking it, so no
    one-step contraction exists in this norm.  Callers that need a usable
    factor should go through :func:`compute_sigma`.
    """
    if aug.pi is None:
        raise AnalysisError(
            "contraction factor needs the stationary vector; build the augmented "
            "system with prune=True"
        )
    if aug.n_bar == 1:
        return 0.0
    root = np.sqrt(aug.pi)
    s = aug.xi * (root[None, :] / root[:, None])
    return float(singular_values(s)[1])


def asymptotic_contraction_factor(aug: AugmentedSystem) -> float:
    """Second-largest eigenvalue magnitude of the augmented matrix.

    Computed as the spectral radius of the deflated matrix
    ``Xi - pi @ ones.T`` (the eigenvalue 1 is removed exactly; all other
    eigenvalues are untouched) via normalized repeated squaring.
    """
    if aug.pi is None:
        raise AnalysisError(
            "contraction factor needs the stationary vector; build the augmented "
            "system with prune=True"
        )
    deflated = aug.xi - np.outer(aug.pi, np.ones(aug.n_bar))
    return spectral_radius_by_squaring(deflated)


_SIGMA_ONE_TOL = 1e-9


def compute_sigma(aug: AugmentedSystem) -> float:
    """Contraction factor of the augmented system, in ``[0, 1)``.

    Returns the second-largest singular value of the similarity-transformed
    matrix when that genuinely contracts.  When it degenerates to 1
    (structurally unavoidable for delay chains with pass-through levels,
    where mass shifts without shrinking for up to ``tau_bar`` steps), falls
    back to the asymptotic factor: the second-largest eigenvalue magnitude,
    which is below 1 for every primitive augmentation and is the quantity
    that grows toward 1 as delays lengthen.  A result at or above 1 on both
    routes means the augmented graph is not primitive or not strongly
    connected and is reported as an error.
    """
    sigma = contraction_singular_value(aug)
    if sigma < 1.0 - _SIGMA_ONE_TOL:
        return sigma
    sigma = asymptotic_contraction_factor(aug)
    if sigma >= 1.0 - 1e-13:
        raise AnalysisError(
            f"contraction factor {sigma:.6f} >= 1: the augmented system does not contract "
            f"(non-primitive or disconnected augmented graph)"
        )
    return sigma


def sigma_route(aug: AugmentedSystem) -> str:
    """Which route :func:`compute_sigma` takes: 'weighted-norm' or 'asymptotic'."""
    return (
        "weighted-norm"
        if contraction_singular_value(aug) < 1.0 - _SIGMA_ONE_TOL
        else "asymptotic"
    )


def compute_norm_constants(aug: AugmentedSystem) -> tuple[float, float]:
    """Spectral norms ``(epsilon, xi_norm)`` of ``I - Xi_inf`` and ``Xi - I``."""
    if aug.xi_inf is None:
        raise AnalysisError(
            "norm constants need the stationary projector; build the augmented "
            "system with prune=True"
        )
    eye = np.eye(aug.n_bar)
    epsilon = spectral_norm(eye - aug.xi_inf)
    xi_norm = spectral_norm(aug.xi - eye)
    return epsilon, xi_norm


def estimate_y_bounds(
    aug: AugmentedSystem,
    burn_in: int | None = None,
    horizon: int | None = None,
) -> tuple[float, float]:
    """Bounds on the auxiliary-mass diagonal over a finite horizon.

    Runs the mass iteration from ones on the actual nodes.  ``y_sup`` is the
    largest entry seen up to ``horizon``; ``y_tilde`` is the largest inverse
    of the smallest entry over ``[burn_in, horizon]``, after every entry has
    become positive.  A zero entry at or past ``burn_in`` on a pruned system
    means the pruning is broken and raises.
    """
    tau = aug.tau_bar
    if burn_in is None:
        burn_in = tau + 1
    if horizon is None:
        horizon = burn_in + 500
    if not (horizon > burn_in >= tau + 1):
        raise ValueError(f"need horizon > burn_in >= tau_bar + 1, got {horizon}, {burn_in}")
    y = np.zeros(aug.n_bar)
    y[: aug.n] = 1.0
    y_sup = 1.0
    y_tilde = 0.0
    for k in range(1, horizon + 1):
        y = aug.xi @ y
        y_sup = max(y_sup, float(y.max()))
        if k >= burn_in:
            smallest = float(y.min())
            if smallest <= 0.0:
                raise AnalysisError(
                    f"augmented mass entry still zero at step {k} >= burn_in {burn_in}; "
                    f"virtual chain without inflow (pruning bug)"
                )
            y_tilde = max(y_tilde, 1.0 / smallest)
    return y_sup, y_tilde


def derive_constants(
    aug: AugmentedSystem,
    objectives: list[LocalObjective],
    *,
    overrides: dict[str, float] | None = None,
    burn_in: int | None = None,
    horizon: int | None = None,
) -> ConvergenceConstants:
    """Assemble constants from the system, with explicit user overrides.

    Recognized override keys: ``c, d, L, mu, y, y_tilde, epsilon, xi``.
    ``sigma`` and the augmented node count are always measured.
    """
    ov = dict(overrides or {})
    unknown = sorted(set(ov) - set(OVERRIDE_KEYS))
    if unknown:
        raise ValueError(f"unknown constant overrides: {', '.join(unknown)}")
    sigma = compute_sigma(aug)
    if "epsilon" in ov and "xi" in ov:
        epsilon, xi_norm = float(ov["epsilon"]), float(ov["xi"])
    else:
        epsilon, xi_norm = compute_norm_constants(aug)
        epsilon = float(ov.get("epsilon", epsilon))
        xi_norm = float(ov.get("xi", xi_norm))
    if "y" in ov and "y_tilde" in ov:
        y_sup, y_tilde = float(ov["y"]), float(ov["y_tilde"])
    else:
        y_sup, y_tilde = estimate_y_bounds(aug, burn_in=burn_in, horizon=horizon)
        y_sup = float(ov.get("y", y_sup))
        y_tilde = float(ov.get("y_tilde", y_tilde))
    if "L" in ov and "mu" in ov:
        lip, strong = float(ov["L"]), float(ov["mu"])
    else:
        lip, strong = aggregate_constants(objectives)
        lip = float(ov.get("L", lip))
        strong = float(ov.get("mu", strong))
    return ConvergenceConstants(
        sigma=sigma,
        epsilon=epsilon,
        xi_norm=xi_norm,
        y_sup=y_sup,
        y_tilde=y_tilde,
        L=lip,
        mu=strong,
        n_bar=aug.n_bar,
        c=float(ov.get("c", 1.0)),
        d=float(ov.get("d", 1.0)),
    )


def alpha_bar(cc: ConvergenceConstants) -> float:
    """Largest step size with a guaranteed spectral radius below one.

    ``min((sqrt(delta^2 + 4*n_bar*mu*(1-sigma)^2*theta) - delta) / (2*theta),
    1/(n_bar*L))`` with ``delta = n_bar*mu*c*d*epsilon*L*y_tilde*(1-sigma+xi)``
    and ``theta = c*d*epsilon*L^2*y*y_tilde^2*(L + n_bar*mu)``.
    """
    delta = cc.n_bar * cc.mu * cc.c * cc.d * cc.epsilon * cc.L * cc.y_tilde * (
        1.0 - cc.sigma + cc.xi_norm
    )
    theta = cc.c * cc.d * cc.epsilon * cc.L**2 * cc.y_sup * cc.y_tilde**2 * (
        cc.L + cc.n_bar * cc.mu
    )
    root = math.sqrt(delta * delta + 4.0 * cc.n_bar * cc.mu * (1.0 - cc.sigma) ** 2 * theta)
    bound = min((root - delta) / (2.0 * theta), 1.0 / (cc.n_bar * cc.L))
    if not (bound > 0):
        raise AnalysisError(f"no positive step-size bound exists for constants {cc}")
    return bound


def build_G(cc: ConvergenceConstants, alpha: float) -> np.ndarray:
    """The 3x3 nonnegative matrix bounding the coupled error recursion."""
    if alpha <= 0:
        raise ValueError(f"step size must be positive, got {alpha}")
    eta = cc.eta(alpha)
    c, d, lip = cc.c, cc.d, cc.L
    y, yt = cc.y_sup, cc.y_tilde
    eps, xin, s = cc.epsilon, cc.xi_norm, cc.sigma
    return np.array(
        [
            [s, 0.0, alpha],
            [alpha * c * lip * yt, eta, 0.0],
            [
                c * d * eps * lip * yt * (xin + alpha * lip * y * yt),
                alpha * d * eps * lip**2 * y * yt,
                s + alpha * c * d * eps * lip * yt,
            ],
        ]
    )


def spectral_radius(g: np.ndarray) -> float:
    """Largest eigenvalue magnitude of the 3x3 stability matrix."""
    return spectral_radius_3x3(g)


@dataclass(frozen=True)
class AlphaSweep:
    """Spectral radius sampled over a step-size grid."""

    alphas: np.ndarray
    rhos: np.ndarray

    @property
    def best_alpha(self) -> float:
        """Grid point minimizing the spectral radius."""
        return float(self.alphas[int(np.argmin(self.rhos))])

    @property
    def best_rho(self) -> float:
        return float(np.min(self.rhos))


def default_alpha_grid(bound: float, n_points: int = 200) -> np.ndarray:
    """Log-spaced interior grid of ``(0, bound)``."""
    if n_points < 2:
        raise ValueError("grid needs at least two points")
    return bound * np.geomspace(1e-4, 1.0, n_points + 1)[:-1]


def sweep_alpha(cc: ConvergenceConstants, grid) -> AlphaSweep:
    """Spectral radius per grid point."""
    alphas = np.asarray(grid, dtype=float)
    if alphas.size == 0 or np.any(alphas <= 0):
        raise ValueError("grid must be nonempty and positive")
    rhos = np.array([spectral_radius(build_G(cc, a)) for a in alphas])
    return AlphaSweep(alphas=alphas, rhos=rhos)


def min_rho_alpha(cc: ConvergenceConstants, n_points: int = 200) -> float:
    """Best-rate step size: grid argmin of the radius inside ``(0, alpha_bar)``."""
    return sweep_alpha(cc, default_alpha_grid(alpha_bar(cc), n_points)).best_alpha
