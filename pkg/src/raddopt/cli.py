"""Command-line experiment harness.

Subcommands: ``simulate`` runs one configured experiment, ``analyze``
reports the stability constants and step-size bound, ``sweep-alpha``
samples the spectral-radius curve, and ``reproduce-paper`` regenerates the
bundled example's full artifact suite (contraction table, radius curves,
residual curves, manifest).

Exit codes for ``simulate``: 0 converged, 1 malformed input, 2 not
converged within the iteration budget, 3 divergence guard tripped.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import canonical
from .analysis import (
    AlphaSweep,
    alpha_bar,
    default_alpha_grid,
    derive_constants,
    sigma_route,
    sweep_alpha,
)
from .config import RunConfig, parse_run_config
from .delays import DelayAssignment, TimeVaryingDelaySampler, build_augmented, load_delays
from .engine import run_gradient_tracking, run_matrix, run_message_passing, run_ratio_consensus
from .errors import AnalysisError, DivergenceError, InputError
from .graph import build_weight_matrix, load_digraph
from .objectives import closed_form_minimizer, load_objectives
from .plotting import line_plot_svg


def _write_curve_csv(path: Path, alphas, rhos) -> None:
    lines = ["alpha,rho"]
    lines += [f"{format(a, '.17g')},{format(r, '.17g')}" for a, r in zip(alphas, rhos)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _Setup:
    """Everything a run needs, loaded from one config."""

    def __init__(self, cfg: RunConfig, cli_seed: int | None):
        self.cfg = cfg
        self.graph = load_digraph(cfg.graph)
        self.p = build_weight_matrix(self.graph)
        self.objectives = load_objectives(cfg.objectives, self.graph.n)
        self.x0 = np.array([o.phi for o in self.objectives])
        self.x_star = closed_form_minimizer(self.objectives)
        self.conjecture_mode = cfg.time_varying
        if cfg.time_varying:
            seed = cfg.delay_seed if cfg.delay_seed is not None else (cli_seed or 0)
            self.delays = TimeVaryingDelaySampler(tau_star_bar=cfg.delay_bound, seed=seed)
            # worst-case fixed-delay augmentation at the bound
            self.analysis_delays = DelayAssignment.uniform(self.graph, cfg.delay_bound)
        else:
            self.delays = load_delays(cfg.delays, self.graph)
            self.analysis_delays = self.delays

    def analysis(self):
        """(augmented system, constants, bound, sweep) for the configured run."""
        delays = self.analysis_delays
        if self.cfg.algorithm == "add-opt":
            delays = DelayAssignment.for_graph(self.graph, {})
        aug = build_augmented(self.p, delays)
        cc = derive_constants(aug, self.objectives, overrides=self.cfg.overrides)
        bar = alpha_bar(cc)
        sweep = sweep_alpha(cc, default_alpha_grid(bar, self.cfg.alpha_grid))
        return aug, cc, bar, sweep

    def resolve_alpha(self, bar: float, sweep: AlphaSweep) -> float:
        alpha = self.cfg.alpha
        if alpha == "auto-min-rho":
            return sweep.best_alpha
        if alpha == "auto-half-bar":
            return bar / 2.0
        return float(alpha)


def _summary_block(cc, bar, sweep, *, conjecture: bool, route: str) -> str:
    lines = [
        f"sigma        = {cc.sigma:.12g}   (route: {route})",
        f"xi           = {cc.xi_norm:.12g}",
        f"epsilon      = {cc.epsilon:.12g}",
        f"y, y_tilde   = {cc.y_sup:.12g}, {cc.y_tilde:.12g}",
        f"L, mu        = {cc.L:.12g}, {cc.mu:.12g}",
        f"c, d         = {cc.c:.12g}, {cc.d:.12g}",
        f"n_bar        = {cc.n_bar}",
        f"alpha_bar    = {bar:.12g}",
        f"argmin alpha = {sweep.best_alpha:.12g}   (rho = {sweep.best_rho:.12g})",
    ]
    if conjecture:
        lines.append(
            "mode         = conjecture (time-varying delays; constants from the "
            "worst-case fixed-delay augmentation at the bound)"
        )
    return "\n".join(lines) + "\n"


def _cmd_simulate(args) -> int:
    cfg = parse_run_config(args.config)
    setup = _Setup(cfg, args.seed)
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)

    summary = ""
    alpha = None
    aug = None
    if cfg.algorithm != "ratio-consensus":
        aug, cc, bar, sweep = setup.analysis()
        alpha = setup.resolve_alpha(bar, sweep)
        summary = _summary_block(
            cc, bar, sweep, conjecture=setup.conjecture_mode, route=sigma_route(aug)
        )

    try:
        if cfg.algorithm == "ratio-consensus":
            trace = run_ratio_consensus(
                setup.graph, setup.p, setup.delays, setup.x0, cfg.max_iter, tol=cfg.tol
            )
        elif cfg.algorithm == "add-opt":
            trace = run_gradient_tracking(
                setup.p, setup.objectives, alpha, setup.x0,
                x_star=setup.x_star, max_iter=cfg.max_iter, tol=cfg.tol,
            )
        elif cfg.algorithm == "radd-opt-matrix":
            trace = run_matrix(
                aug, setup.objectives, alpha, setup.x0,
                x_star=setup.x_star, max_iter=cfg.max_iter, tol=cfg.tol,
            )
        else:
            trace = run_message_passing(
                setup.graph, setup.p, setup.delays, setup.objectives, alpha, setup.x0,
                x_star=setup.x_star, max_iter=cfg.max_iter, tol=cfg.tol,
                interpretation=cfg.interpretation,
            )
    except DivergenceError as err:
        (out / "summary.txt").write_text(summary + f"run diverged: {err}\n", encoding="utf-8")
        print(f"diverged: {err}", file=sys.stderr)
        return 3

    trace.to_csv(out / "trace.csv")
    status = "converged" if trace.converged else "did not converge"
    tail = (
        f"algorithm    = {cfg.algorithm}\n"
        f"alpha        = {alpha if alpha is not None else 'n/a'}\n"
        f"steps        = {trace.steps}\n"
        f"residual     = {trace.residuals[-1]:.12g}\n"
        f"outcome      = {status} (tol {cfg.tol:g})\n"
    )
    (out / "summary.txt").write_text(summary + tail, encoding="utf-8")
    if args.format == "svg":
        svg = line_plot_svg(
            np.arange(len(trace.residuals)), trace.residuals,
            title="residual per step", xlabel="step", ylabel="log10 residual", log_y=True,
        )
        (out / "residual.svg").write_text(svg, encoding="utf-8")
    print(tail, end="")
    return 0 if trace.converged else 2


def _cmd_analyze(args) -> int:
    cfg = parse_run_config(args.config)
    setup = _Setup(cfg, args.seed)
    if cfg.algorithm == "ratio-consensus":
        raise InputError(f"{args.config}: analyze needs a gradient algorithm, not ratio-consensus")
    aug, cc, bar, sweep = setup.analysis()
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    _write_curve_csv(out / "analysis.csv", sweep.alphas, sweep.rhos)
    summary = _summary_block(cc, bar, sweep, conjecture=setup.conjecture_mode, route=sigma_route(aug))
    (out / "summary.txt").write_text(summary, encoding="utf-8")
    if args.format == "svg":
        svg = line_plot_svg(
            sweep.alphas, sweep.rhos,
            title="spectral radius vs step size", xlabel="alpha", ylabel="rho",
        )
        (out / "analysis.svg").write_text(svg, encoding="utf-8")
    print(summary, end="")
    return 0


def _cmd_sweep_alpha(args) -> int:
    cfg = parse_run_config(args.config)
    setup = _Setup(cfg, args.seed)
    if cfg.algorithm == "ratio-consensus":
        raise InputError(f"{args.config}: sweeps need a gradient algorithm, not ratio-consensus")
    aug, cc, bar, _ = setup.analysis()
    sweep = sweep_alpha(cc, default_alpha_grid(bar, args.grid))
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    _write_curve_csv(out / "sweep.csv", sweep.alphas, sweep.rhos)
    if args.format == "svg":
        svg = line_plot_svg(
            sweep.alphas, sweep.rhos,
            title="spectral radius vs step size", xlabel="alpha", ylabel="rho",
        )
        (out / "sweep.svg").write_text(svg, encoding="utf-8")
    print(f"alpha_bar    = {bar:.12g}")
    print(f"argmin alpha = {sweep.best_alpha:.12g}   (rho = {sweep.best_rho:.12g})")
    return 0


def _cmd_reproduce(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base_seed = args.seed or 0
    graph = canonical.canonical_digraph()
    p = build_weight_matrix(graph)
    objectives = canonical.canonical_objectives()
    x0 = canonical.canonical_x0()
    x_star = closed_form_minimizer(objectives)
    overrides = dict(canonical.ANALYSIS_OVERRIDES)

    files: list[Path] = []
    failed: dict[str, str] = {}
    summary_parts: list[str] = [
        "bundled five-node example; stability constants pinned to the example's "
        "reference set, contraction factor and node count measured per delay bound\n"
    ]

    for name, path in canonical.write_canonical_files(out / "canonical").items():
        files.append(path)

    sigma_rows: list[tuple[int, float]] = []
    for tau in canonical.DELAY_TAUS:
        cell = f"tau{tau}"
        try:
            delays = canonical.canonical_delays(tau)
            aug = build_augmented(p, delays)
            cc = derive_constants(aug, objectives, overrides=overrides)
            bar = alpha_bar(cc)
            sigma_rows.append((tau, cc.sigma))
            # radius curve across the bound so the crossing at alpha_bar is visible
            grid = bar * np.geomspace(1e-3, 10.0, 200)
            sweep = sweep_alpha(cc, grid)
            rho_path = out / f"rho_{cell}.csv"
            _write_curve_csv(rho_path, sweep.alphas, sweep.rhos)
            files.append(rho_path)
            interior = sweep_alpha(cc, default_alpha_grid(bar, 200))
            trace = run_message_passing(
                graph, p, delays, objectives, interior.best_alpha, x0,
                x_star=x_star, max_iter=5000, tol=1e-10,
            )
            res_path = out / f"residual_{cell}.csv"
            trace.to_csv(res_path)
            files.append(res_path)
            if args.format == "svg":
                svg_path = out / f"rho_{cell}.svg"
                svg_path.write_text(
                    line_plot_svg(sweep.alphas, sweep.rhos, title=f"radius, bound {tau}",
                                  xlabel="alpha", ylabel="rho"),
                    encoding="utf-8",
                )
                files.append(svg_path)
                svg_path = out / f"residual_{cell}.svg"
                svg_path.write_text(
                    line_plot_svg(np.arange(len(trace.residuals)), trace.residuals,
                                  title=f"residual, bound {tau}", xlabel="step",
                                  ylabel="log10 residual", log_y=True),
                    encoding="utf-8",
                )
                files.append(svg_path)
            summary_parts.append(
                f"[{cell}] " + _summary_block(cc, bar, interior, conjecture=False,
                                              route=sigma_route(aug))
            )
        except Exception as err:  # record the failed cell, keep going
            failed[cell] = f"{type(err).__name__}: {err}"

    try:
        table_path = out / "sigma_table.csv"
        lines = ["tau_bar,sigma"]
        lines += [f"{t},{format(s, '.17g')}" for t, s in sigma_rows]
        table_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        files.append(table_path)
    except Exception as err:
        failed["sigma_table"] = f"{type(err).__name__}: {err}"

    # time-varying ensemble at bound 2, best-rate step size of the worst case
    try:
        tv_bound = 2
        delays = DelayAssignment.uniform(graph, tv_bound)
        aug = build_augmented(p, delays)
        cc = derive_constants(aug, objectives, overrides=overrides)
        bar = alpha_bar(cc)
        alpha = sweep_alpha(cc, default_alpha_grid(bar, 200)).best_alpha
        for seed in range(base_seed, base_seed + 5):
            cell = f"tv_bound{tv_bound}_seed{seed}"
            try:
                sampler = TimeVaryingDelaySampler(tau_star_bar=tv_bound, seed=seed)
                trace = run_message_passing(
                    graph, p, sampler, objectives, alpha, x0,
                    x_star=x_star, max_iter=5000, tol=1e-10,
                )
                res_path = out / f"residual_{cell}.csv"
                trace.to_csv(res_path)
                files.append(res_path)
            except Exception as err:
                failed[cell] = f"{type(err).__name__}: {err}"
        summary_parts.append(
            f"[time-varying] bound = {tv_bound}, alpha = {alpha:.12g} "
            f"(argmin over the worst-case fixed augmentation; conjecture mode)\n"
        )
    except Exception as err:
        failed["tv_setup"] = f"{type(err).__name__}: {err}"

    summary_path = out / "summary.txt"
    summary_path.write_text("\n".join(summary_parts), encoding="utf-8")
    files.append(summary_path)

    manifest = {
        "files": {str(f.relative_to(out)): _sha256(f) for f in sorted(set(files))},
        "failed": dict(sorted(failed.items())),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if failed:
        for cell, msg in sorted(failed.items()):
            print(f"FAILED {cell}: {msg}", file=sys.stderr)
        return 1
    print(f"suite written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raddopt",
        description="Simulate and analyze delay-robust distributed optimization over digraphs.",
    )
    parser.add_argument("--seed", type=int, default=None, help="base seed for seeded runs")
    parser.add_argument("--format", choices=("csv", "svg"), default="csv",
                        help="csv only, or csv plus static svg plots")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configured experiment")
    p_sim.add_argument("--config", required=True)
    p_sim.set_defaults(func=_cmd_simulate)

    p_an = sub.add_parser("analyze", help="report stability constants and the step-size bound")
    p_an.add_argument("--config", required=True)
    p_an.set_defaults(func=_cmd_analyze)

    p_sw = sub.add_parser("sweep-alpha", help="sample the spectral-radius curve")
    p_sw.add_argument("--config", required=True)
    p_sw.add_argument("--grid", type=int, default=200)
    p_sw.set_defaults(func=_cmd_sweep_alpha)

    p_rp = sub.add_parser("reproduce-paper", help="regenerate the bundled example's artifact suite")
    p_rp.add_argument("--out", required=True)
    p_rp.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, AnalysisError) as err:
        # a failed spectral computation means the configured system violates
        # the standing assumptions, which is an input problem
        print(f"error: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
