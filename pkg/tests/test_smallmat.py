from __future__ import annotations

import numpy as np
import pytest

from raddopt.errors import AnalysisError
from raddopt.smallmat import (
    cubic_roots,
    symmetric_eigenvalues,
    perron_vector,
    singular_values,
    spectral_norm,
    spectral_radius_3x3,
    spectral_radius_by_squaring,
)


def test_symmetric_eigenvalues_match_numpy():
    rng = np.random.default_rng(10)
    for _ in range(40):
        n = int(rng.integers(1, 35))
        m = rng.normal(size=(n, n))
        a = (m + m.T) / 2.0
        mine = symmetric_eigenvalues(a)
        ref = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.max(np.abs(mine - ref)) < 1e-10


def test_symmetric_eigenvalues_diagonal_and_zero():
    assert np.allclose(symmetric_eigenvalues(np.diag([3.0, -1.0, 2.0])), [3.0, 2.0, -1.0])
    assert np.allclose(symmetric_eigenvalues(np.zeros((4, 4))), 0.0)


def test_symmetric_eigenvalues_reject_nonsquare():
    with pytest.raises(ValueError):
        symmetric_eigenvalues(np.ones((2, 3)))


def test_singular_values_match_numpy():
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(1, 30))
        a = rng.normal(size=(n, n))
        assert np.max(np.abs(singular_values(a) - np.linalg.svd(a, compute_uv=False))) < 1e-9


def test_spectral_norm_identity():
    assert spectral_norm(np.eye(6)) == pytest.approx(1.0, abs=1e-12)


def test_cubic_roots_match_numpy_roots():
    rng = np.random.default_rng(12)
    for _ in range(300):
        a2, a1, a0 = rng.normal(scale=3.0, size=3)
        mine = sorted(cubic_roots(a2, a1, a0), key=lambda z: (z.real, z.imag))
        ref = sorted(np.roots([1.0, a2, a1, a0]), key=lambda z: (z.real, z.imag))
        for x, y in zip(mine, ref):
            assert abs(x - y) < 1e-8


def test_cubic_triple_root():
    roots = cubic_roots(-3.0, 3.0, -1.0)  # (x-1)^3
    assert np.allclose(sorted(r.real for r in roots), 1.0, atol=1e-5)
    assert np.allclose([r.imag for r in roots], 0.0, atol=1e-5)


def test_spectral_radius_3x3_vs_char_poly_roots():
    rng = np.random.default_rng(13)
    for _ in range(200):
        g = rng.normal(size=(3, 3))
        tr = np.trace(g)
        minors = (
            g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
            + g[0, 0] * g[2, 2] - g[0, 2] * g[2, 0]
            + g[1, 1] * g[2, 2] - g[1, 2] * g[2, 1]
        )
        det = np.linalg.det(g)
        brute = max(abs(r) for r in np.roots([1.0, -tr, minors, -det]))
        assert spectral_radius_3x3(g) == pytest.approx(brute, abs=1e-10, rel=1e-10)


def test_spectral_radius_3x3_vs_eigvals():
    rng = np.random.default_rng(14)
    for _ in range(200):
        g = rng.normal(size=(3, 3))
        ref = max(abs(np.linalg.eigvals(g)))
        assert spectral_radius_3x3(g) == pytest.approx(ref, rel=1e-8, abs=1e-8)


def test_spectral_radius_by_squaring_matches_eigvals():
    rng = np.random.default_rng(15)
    for _ in range(40):
        n = int(rng.integers(2, 40))
        b = rng.normal(size=(n, n))
        ref = max(abs(np.linalg.eigvals(b)))
        assert spectral_radius_by_squaring(b) == pytest.approx(ref, rel=1e-9)


def test_spectral_radius_by_squaring_nilpotent():
    b = np.zeros((3, 3))
    b[0, 1] = 5.0
    b[1, 2] = 2.0
    assert spectral_radius_by_squaring(b) == 0.0


def test_perron_vector_column_stochastic():
    p = np.array([[0.5, 0.25], [0.5, 0.75]])
    pi = perron_vector(p)
    assert pi.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.linalg.norm(p @ pi - pi) < 1e-11
    ref = np.array([1.0 / 3.0, 2.0 / 3.0])
    assert np.allclose(pi, ref, atol=1e-10)


def test_perron_vector_fails_on_periodic():
    # bipartite with an asymmetric split: the iteration oscillates forever
    m = np.array([[0.0, 0.0, 0.3], [0.0, 0.0, 0.7], [1.0, 1.0, 0.0]])
    with pytest.raises(AnalysisError, match="residual"):
        perron_vector(m, max_iter=2000)
