"""Acceptance gate: one test per promised behavior, each at a fixed tolerance.

Each test prints one PASS line (visible with ``pytest -s`` or in the
captured output summary).  The configuration under test is the bundled
five-node example with its reference constant set; the contraction factor
and augmented node count are measured per delay bound.
"""
from __future__ import annotations

import numpy as np
import pytest

from raddopt import (
    DelayAssignment,
    QuadraticObjective,
    TimeVaryingDelaySampler,
    alpha_bar,
    build_G,
    build_augmented,
    build_weight_matrix,
    closed_form_minimizer,
    default_alpha_grid,
    derive_constants,
    gradient_vector,
    run_matrix,
    run_message_passing,
    spectral_radius,
    sweep_alpha,
)
from raddopt.canonical import (
    ANALYSIS_OVERRIDES,
    DELAY_TAUS,
    canonical_delays,
    canonical_digraph,
    canonical_objectives,
    canonical_x0,
)
from conftest import random_sc_digraph

GRAPH = canonical_digraph()
P = build_weight_matrix(GRAPH)
OBJECTIVES = canonical_objectives()
X0 = canonical_x0()
X_STAR = closed_form_minimizer(OBJECTIVES)


def constants_for(tau: int):
    aug = build_augmented(P, canonical_delays(tau))
    cc = derive_constants(aug, OBJECTIVES, overrides=ANALYSIS_OVERRIDES)
    return aug, cc


@pytest.fixture(scope="module")
def best_rate_runs():
    """Criterion-2 runs, shared with criteria 5 and 6."""
    runs = {}
    for tau in DELAY_TAUS:
        aug, cc = constants_for(tau)
        bar = alpha_bar(cc)
        alpha = sweep_alpha(cc, default_alpha_grid(bar, 200)).best_alpha
        mp = run_message_passing(
            GRAPH, P, canonical_delays(tau), OBJECTIVES, alpha, X0,
            x_star=X_STAR, max_iter=5000, tol=1e-10,
        )
        mx = run_matrix(
            aug, OBJECTIVES, alpha, X0, x_star=X_STAR, max_iter=5000, tol=1e-10,
            record_augmented=True,
        )
        runs[tau] = (alpha, mp, mx, aug)
    return runs


def test_criterion_01_zero_delay_reduction():
    """With no delays, the node-level engine is the undelayed iteration."""
    alpha = 0.01
    d0 = DelayAssignment.for_graph(GRAPH, {})
    trace = run_message_passing(
        GRAPH, P, d0, OBJECTIVES, alpha, X0,
        x_star=X_STAR, max_iter=500, interpretation="own-w-once",
    )
    # independently coded reference: x <- Px - a*w with gradient tracking
    x = X0.copy()
    y = np.ones(GRAPH.n)
    z = x / y
    g = np.array([o.gradient(v) for o, v in zip(OBJECTIVES, z)])
    w = g.copy()
    zs = [z.copy()]
    for _ in range(500):
        x = P @ x - alpha * w
        y = P @ y
        z = x / y
        g_new = np.array([o.gradient(v) for o, v in zip(OBJECTIVES, z)])
        w = P @ w + g_new - g
        g = g_new
        zs.append(z.copy())
    diff = float(np.max(np.abs(trace.z - np.vstack(zs))))
    assert diff <= 1e-12
    print(f"\nACCEPTANCE 01 PASS zero-delay reduction (max diff {diff:.2e} <= 1e-12)")


def test_criterion_02_optimal_value(best_rate_runs):
    for tau, (alpha, mp, mx, _) in best_rate_runs.items():
        assert mp.residuals.min() <= 1e-8, f"tau={tau} node engine missed 1e-8"
        assert mx.residuals.min() <= 1e-8, f"tau={tau} matrix engine missed 1e-8"
        assert mp.steps <= 5000 and mx.steps <= 5000
        assert abs(np.mean(mp.z[-1]) - 2.5) <= 1e-4
    print("ACCEPTANCE 02 PASS both engines reach x*=2.5 (residual <= 1e-8, <= 5000 iters, "
          "delay bounds 0/2/5/10)")


def test_criterion_03_step_size_guarantee():
    for tau in DELAY_TAUS:
        _, cc = constants_for(tau)
        bar = alpha_bar(cc)
        for alpha in np.linspace(bar / 21, 20 * bar / 21, 20):
            rho = spectral_radius(build_G(cc, alpha))
            assert rho < 1.0, f"tau={tau} alpha={alpha} rho={rho}"
    rng = np.random.default_rng(2024)
    for _ in range(200):
        lip = float(10.0 ** rng.uniform(-1.0, 1.0))
        from raddopt import ConvergenceConstants

        cc = ConvergenceConstants(
            sigma=float(rng.uniform(0.02, 0.98)),
            epsilon=float(10.0 ** rng.uniform(-1.0, 0.5)),
            xi_norm=float(10.0 ** rng.uniform(-1.0, 0.5)),
            y_sup=float(rng.uniform(1.0, 5.0)),
            y_tilde=float(rng.uniform(1.0, 20.0)),
            L=lip,
            mu=lip * float(rng.uniform(0.02, 1.0)),
            n_bar=int(rng.integers(1, 80)),
            c=float(rng.uniform(1.0, 4.0)),
            d=float(rng.uniform(1.0, 4.0)),
        )
        bar = alpha_bar(cc)
        for alpha in np.linspace(bar / 21, 20 * bar / 21, 20):
            assert spectral_radius(build_G(cc, alpha)) < 1.0
    print("ACCEPTANCE 03 PASS rho(G) < 1 on 20 interior points per delay bound and for "
          "200 randomized constant sets")


def test_criterion_04_sigma_trend_and_cross_check():
    sigmas = []
    for tau in DELAY_TAUS:
        aug, cc = constants_for(tau)
        sigmas.append(cc.sigma)
        # cross-check: in-house similarity-transform route vs the direct
        # weighted matrix norm of the centered matrix, both via brute SVD
        root = np.sqrt(aug.pi)
        s_mat = aug.xi * (root[None, :] / root[:, None])
        svd_route = float(np.linalg.svd(s_mat, compute_uv=False)[1])
        weighted_route = float(
            np.linalg.svd(s_mat - np.outer(root, root), compute_uv=False)[0]
        )
        assert abs(svd_route - weighted_route) <= 1e-8
        if tau == 0:
            assert cc.sigma == pytest.approx(svd_route, abs=1e-8)
    assert all(0.0 < s < 1.0 for s in sigmas)
    assert all(a < b for a, b in zip(sigmas, sigmas[1:]))
    table = ", ".join(f"{t}:{s:.3f}" for t, s in zip(DELAY_TAUS, sigmas))
    print(f"ACCEPTANCE 04 PASS contraction factor strictly increasing in (0,1) [{table}]; "
          f"SVD and weighted-norm routes agree to 1e-8")


def test_criterion_05_conservation_invariants(best_rate_runs):
    for tau, (alpha, _, mx, aug) in best_rate_runs.items():
        y = mx.augmented["y"]
        w = mx.augmented["w"]
        z = mx.augmented["z"]
        x = mx.augmented["x"]
        n = aug.n
        mass_err = float(np.max(np.abs(y.sum(axis=1) - n)))
        assert mass_err <= 1e-12, f"tau={tau} mass error {mass_err}"
        grad_sums = np.array(
            [gradient_vector(OBJECTIVES, z[k, :n]).sum() for k in range(len(w))]
        )
        track_err = float(np.max(np.abs(w.sum(axis=1) - grad_sums)))
        assert track_err <= 1e-10, f"tau={tau} tracking error {track_err}"
        x_mean = x.mean(axis=1)
        g_mean = grad_sums / aug.n_bar
        rec_err = float(np.max(np.abs(x_mean[1:] - (x_mean[:-1] - alpha * g_mean[:-1]))))
        assert rec_err <= 1e-10, f"tau={tau} average-dynamics error {rec_err}"
    print("ACCEPTANCE 05 PASS per-step conservation: mass <= 1e-12, gradient tracking "
          "<= 1e-10, average dynamics <= 1e-10")


def test_criterion_06_geometric_rate(best_rate_runs):
    for tau, (_, mp, _, _) in best_rate_runs.items():
        res = mp.residuals
        below = np.nonzero(res <= 1e-2)[0]
        assert below.size > 10, f"tau={tau} trace too short for a tail fit"
        start = int(below[0])
        ks = np.arange(start, len(res), dtype=float)
        ys = np.log10(res[start:])
        design = np.vstack([ks, np.ones_like(ks)]).T
        coef, sse, *_ = np.linalg.lstsq(design, ys, rcond=None)
        total = float(np.sum((ys - ys.mean()) ** 2))
        r2 = 1.0 - float(sse[0]) / total
        assert coef[0] < 0.0, f"tau={tau} slope {coef[0]}"
        assert r2 >= 0.99, f"tau={tau} R^2 {r2}"
    print("ACCEPTANCE 06 PASS log-residual tails are straight lines "
          "(negative slope, R^2 >= 0.99)")


def test_criterion_07_engine_oracle_equivalence():
    rng = np.random.default_rng(707)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 6))
        g = random_sc_digraph(rng, n)
        p = build_weight_matrix(g)
        d = DelayAssignment.for_graph(g, {e: int(rng.integers(0, 4)) for e in g.edge_list})
        objs = [
            QuadraticObjective(float(rng.uniform(0.5, 4.0)), float(rng.uniform(-3.0, 5.0)))
            for _ in range(n)
        ]
        x_star = closed_form_minimizer(objs)
        x0 = rng.uniform(-2.0, 6.0, size=n)
        aug = build_augmented(p, d)
        alpha = float(rng.uniform(0.1, 0.9)) * alpha_bar(derive_constants(aug, objs))
        mp = run_message_passing(
            g, p, d, objs, alpha, x0, x_star=x_star, max_iter=200,
            interpretation="matrix-consistent",
        )
        mx = run_matrix(aug, objs, alpha, x0, x_star=x_star, max_iter=200)
        worst = max(worst, float(np.max(np.abs(mp.z - mx.z))))
    assert worst <= 1e-10
    print(f"ACCEPTANCE 07 PASS node-level and matrix engines agree on 50 random systems "
          f"(max diff {worst:.2e} <= 1e-10)")


def test_criterion_08_ratio_consensus():
    from raddopt import run_ratio_consensus

    rng = np.random.default_rng(808)
    d = DelayAssignment.for_graph(
        GRAPH, {e: int(rng.integers(0, 6)) for e in GRAPH.edge_list}
    )
    trace = run_ratio_consensus(GRAPH, P, d, X0, 5000, tol=None)
    fixed_err = float(np.max(np.abs(trace.z[-1] - 3.0)))
    assert fixed_err <= 1e-10
    worst_tv = 0.0
    for seed in range(20):
        sampler = TimeVaryingDelaySampler(tau_star_bar=5, seed=seed)
        trace = run_ratio_consensus(GRAPH, P, sampler, X0, 5000, tol=None)
        worst_tv = max(worst_tv, float(np.max(np.abs(trace.z[-1] - 3.0))))
    assert worst_tv <= 1e-10
    print(f"ACCEPTANCE 08 PASS ratio consensus hits mean(x0)=3.0 under fixed "
          f"(err {fixed_err:.1e}) and time-varying delays, 20 seeds "
          f"(worst {worst_tv:.1e}), both <= 1e-10")


def test_criterion_09_time_varying_conjecture():
    _, cc = constants_for(2)
    alpha = 0.9 * alpha_bar(cc)
    for seed in range(20):
        sampler = TimeVaryingDelaySampler(tau_star_bar=2, seed=seed)
        trace = run_message_passing(
            GRAPH, P, sampler, OBJECTIVES, alpha, X0,
            x_star=X_STAR, max_iter=5000, tol=1e-10,
        )
        assert trace.residuals.min() <= 1e-8, f"seed {seed} missed 1e-8"
    print("ACCEPTANCE 09 PASS time-varying delays (bound 2, alpha at 0.9 of the "
          "guaranteed range) converge for 20 distinct seeds")


def test_criterion_10_gradient_checks():
    h = 1e-5
    worst = 0.0
    for o in OBJECTIVES:
        for z in np.linspace(-10.0, 10.0, 81):
            approx = (o.value(z + h) - o.value(z - h)) / (2.0 * h)
            worst = max(worst, abs(approx - o.gradient(z)))
    assert worst <= 1e-6
    print(f"ACCEPTANCE 10 PASS finite-difference gradient checks on all shipped "
          f"objectives (worst {worst:.2e} <= 1e-6)")
