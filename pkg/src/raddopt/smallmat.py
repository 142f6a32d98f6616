"""Small dense-matrix routines: symmetric eigenvalues, singular values,
cubic characteristic roots, power iteration, and spectral radii.

Everything here targets matrices up to a few hundred rows, where simple
classical schemes are accurate and fast enough that no general eigensolver
dependency is warranted.  ``numpy.linalg`` is deliberately not used on the
main path so tests can cross-check against it as an independent oracle.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import AnalysisError


def _householder_tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a symmetric matrix to tridiagonal form; returns (diag, subdiag)."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        norm_x = math.sqrt(float(x @ x))
        if norm_x == 0.0:
            continue
        alpha = -math.copysign(norm_x, x[0]) if x[0] != 0.0 else -norm_x
        v = x.copy()
        v[0] -= alpha
        v_norm = math.sqrt(float(v @ v))
        if v_norm == 0.0:
            continue
        v /= v_norm
        # two-sided reflection applied to the trailing block
        block = a[k + 1:, k + 1:]
        w = block @ v
        tau = float(v @ w)
        block -= 2.0 * np.outer(v, w) + 2.0 * np.outer(w, v) - 4.0 * tau * np.outer(v, v)
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = alpha
    return np.diag(a).copy(), np.array([a[i + 1, i] for i in range(n - 1)])


def _tridiagonal_eigenvalues(d: np.ndarray, e: np.ndarray, max_iter: int = 60) -> np.ndarray:
    """Implicit-shift QL on a symmetric tridiagonal (diag, subdiag) pair.

    Robust to exactly degenerate clusters, which is what the augmented delay
    chains produce.
    """
    d = d.copy()
    n = len(d)
    e = np.append(e.copy(), 0.0)
    for l in range(n):
        iterations = 0
        while True:
            m = n - 1
            for mm in range(l, n - 1):
                dd = abs(d[mm]) + abs(d[mm + 1])
                if abs(e[mm]) <= 1e-16 * dd:
                    m = mm
                    break
            if m == l:
                break
            iterations += 1
            if iterations > max_iter:
                raise AnalysisError(
                    f"tridiagonal eigenvalue iteration stalled at index {l}"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            broke_early = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    broke_early = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if not broke_early:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return d


def symmetric_eigenvalues(a: np.ndarray, max_iter: int = 60) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, sorted in descending order.

    Householder tridiagonalization followed by implicit-shift QL; the
    combination converges cubically and does not stall on the exactly
    repeated eigenvalues that rotation-only schemes can cycle on.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if n == 1:
        return a[0, :1].copy()
    scale = math.sqrt(float(np.sum(a * a)))
    if scale == 0.0:
        return np.zeros(n)
    d, e = _householder_tridiagonalize(a)
    vals = _tridiagonal_eigenvalues(d, e, max_iter=max_iter)
    return np.sort(vals)[::-1]


def singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values of a real matrix, descending, via eigenvalues of A^T A."""
    a = np.asarray(a, dtype=float)
    vals = symmetric_eigenvalues(a.T @ a)
    return np.sqrt(np.clip(vals, 0.0, None))


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(singular_values(a)[0])


def perron_vector(m: np.ndarray, tol: float = 1e-12, max_iter: int = 10**6) -> np.ndarray:
    """Stationary vector of a column-stochastic matrix by power iteration.

    The iterate is renormalized to sum 1 at every step; iteration stops when
    successive iterates agree to ``tol`` in the max norm.  Raises
    :class:`AnalysisError` with the achieved residual when the budget runs out
    (e.g. for a periodic or reducible matrix).
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    v = np.full(n, 1.0 / n)
    diff = math.inf
    for _ in range(max_iter):
        nxt = m @ v
        total = float(nxt.sum())
        if not math.isfinite(total) or total <= 0.0:
            raise AnalysisError("power iteration lost mass; matrix is not column-stochastic")
        nxt /= total
        diff = float(np.max(np.abs(nxt - v)))
        v = nxt
        if diff <= tol:
            return v
    raise AnalysisError(
        f"power iteration did not reach tolerance {tol:.1e} in {max_iter} steps; "
        f"achieved residual {diff:.3e}"
    )


def spectral_radius_by_squaring(b: np.ndarray, n_squarings: int = 48) -> float:
    """Spectral radius of a general real matrix via normalized repeated squaring.

    ``||B^k||_F**(1/k)`` decreases to the spectral radius; squaring reaches
    ``k = 2**n_squarings`` in ``n_squarings`` multiplications, at which point
    the polynomial prefactor of a defective or ill-conditioned eigenbasis
    contributes less than ~1e-12.  Robust to complex conjugate dominant
    pairs, which plain power iteration is not.
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if b.ndim != 2 or b.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {b.shape}")
    log_acc = 0.0
    for i in range(n_squarings):
        scale = math.sqrt(float(np.sum(b * b)))
        if scale == 0.0 or not math.isfinite(scale):
            return 0.0
        log_acc += math.log(scale) / (2.0**i)
        b = b / scale
        b = b @ b
    scale = math.sqrt(float(np.sum(b * b)))
    if scale > 0.0:
        log_acc += math.log(scale) / (2.0**n_squarings)
    return math.exp(log_acc)


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def cubic_roots(a2: float, a1: float, a0: float) -> np.ndarray:
    """Roots of the monic cubic x^3 + a2 x^2 + a1 x + a0, as complex numbers."""
    shift = -a2 / 3.0
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0:
        r = math.sqrt(disc)
        u = _cbrt(-q / 2.0 + r)
        v = _cbrt(-q / 2.0 - r)
        real = u + v + shift
        re = -(u + v) / 2.0 + shift
        im = (u - v) * math.sqrt(3.0) / 2.0
        return np.array([complex(real, 0.0), complex(re, im), complex(re, -im)])
    if p == 0.0:  # disc <= 0 with p == 0 forces q == 0: triple root
        return np.full(3, complex(shift, 0.0))
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    phi = math.acos(arg)
    roots = [m * math.cos((phi - 2.0 * math.pi * k) / 3.0) + shift for k in range(3)]
    return np.array([complex(r, 0.0) for r in roots])


def spectral_radius_3x3(g: np.ndarray) -> float:
    """Spectral radius of a 3x3 matrix via its characteristic cubic."""
    g = np.asarray(g, dtype=float)
    if g.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {g.shape}")
    tr = g[0, 0] + g[1, 1] + g[2, 2]
    minors = (
        g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        + g[0, 0] * g[2, 2] - g[0, 2] * g[2, 0]
        + g[1, 1] * g[2, 2] - g[1, 2] * g[2, 1]
    )
    det = (
        g[0, 0] * (g[1, 1] * g[2, 2] - g[1, 2] * g[2, 1])
        - g[0, 1] * (g[1, 0] * g[2, 2] - g[1, 2] * g[2, 0])
        + g[0, 2] * (g[1, 0] * g[2, 1] - g[1, 1] * g[2, 0])
    )
    roots = cubic_roots(-tr, minors, -det)
    return max(abs(r) for r in roots)
