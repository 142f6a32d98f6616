"""Run configuration: plain-text ``key = value`` files.

Unknown keys are rejected with line numbers.  Relative paths are resolved
against the config file's directory.  Exactly one delay source must be
given: either a delay file (fixed delays) or a time-varying sampler setup
(``delay_mode = time-varying`` with ``delay_bound`` and optionally
``delay_seed``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError

ALGORITHMS = ("radd-opt-mp", "radd-opt-matrix", "add-opt", "ratio-consensus")
ALPHA_STRATEGIES = ("auto-min-rho", "auto-half-bar")
CONSTANT_KEYS = ("c", "d", "L", "mu", "y", "y_tilde", "epsilon", "xi")

_KNOWN_KEYS = {
    "graph",
    "objectives",
    "delays",
    "delay_mode",
    "delay_bound",
    "delay_seed",
    "algorithm",
    "interpretation",
    "alpha",
    "max_iter",
    "tol",
    "out",
    "alpha_grid",
    *CONSTANT_KEYS,
}


@dataclass
class RunConfig:
    graph: Path
    objectives: Path
    algorithm: str
    delays: Path | None = None
    delay_mode: str = "fixed"
    delay_bound: int | None = None
    delay_seed: int | None = None
    interpretation: str = "own-w-once"
    alpha: float | str | None = None
    max_iter: int = 5000
    tol: float = 1e-10
    out: Path = Path("out")
    alpha_grid: int = 200
    overrides: dict[str, float] = field(default_factory=dict)

    @property
    def time_varying(self) -> bool:
        return self.delay_mode == "time-varying"


def _parse_alpha(text: str, where: str):
    if text in ALPHA_STRATEGIES:
        return text
    try:
        value = float(text)
    except ValueError:
        raise InputError(
            f"{where}: alpha must be a positive number or one of {', '.join(ALPHA_STRATEGIES)}"
        ) from None
    if value <= 0:
        raise InputError(f"{where}: alpha must be positive, got {value}")
    return value


def parse_run_config(path) -> RunConfig:
    path = Path(path)
    base = path.parent
    raw: dict[str, str] = {}
    lines = path.read_text(encoding="utf-8").splitlines()
    for lineno, rawline in enumerate(lines, start=1):
        line = rawline.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise InputError(f"{path}:{lineno}: duplicate key {key!r}")
        if not value:
            raise InputError(f"{path}:{lineno}: empty value for {key!r}")
        raw[key] = value

    def _require(key: str) -> str:
        if key not in raw:
            raise InputError(f"{path}: missing required key {key!r}")
        return raw[key]

    def _int(key: str) -> int:
        try:
            return int(raw[key])
        except ValueError:
            raise InputError(f"{path}: {key} must be an integer, got {raw[key]!r}") from None

    def _float(key: str) -> float:
        try:
            return float(raw[key])
        except ValueError:
            raise InputError(f"{path}: {key} must be a number, got {raw[key]!r}") from None

    algorithm = _require("algorithm")
    if algorithm not in ALGORITHMS:
        raise InputError(f"{path}: unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")

    cfg = RunConfig(
        graph=base / _require("graph"),
        objectives=base / _require("objectives"),
        algorithm=algorithm,
    )
    if "delays" in raw:
        cfg.delays = base / raw["delays"]
    if "delay_mode" in raw:
        if raw["delay_mode"] not in ("fixed", "time-varying"):
            raise InputError(f"{path}: delay_mode must be 'fixed' or 'time-varying'")
        cfg.delay_mode = raw["delay_mode"]
    if "delay_bound" in raw:
        cfg.delay_bound = _int("delay_bound")
        if cfg.delay_bound < 0:
            raise InputError(f"{path}: delay_bound must be nonnegative")
    if "delay_seed" in raw:
        cfg.delay_seed = _int("delay_seed")
    if "interpretation" in raw:
        cfg.interpretation = raw["interpretation"]
    if "alpha" in raw:
        cfg.alpha = _parse_alpha(raw["alpha"], str(path))
    if "max_iter" in raw:
        cfg.max_iter = _int("max_iter")
        if cfg.max_iter < 1:
            raise InputError(f"{path}: max_iter must be positive")
    if "tol" in raw:
        cfg.tol = _float("tol")
        if cfg.tol <= 0:
            raise InputError(f"{path}: tol must be positive")
    if "alpha_grid" in raw:
        cfg.alpha_grid = _int("alpha_grid")
        if cfg.alpha_grid < 2:
            raise InputError(f"{path}: alpha_grid must be at least 2")
    if "out" in raw:
        cfg.out = base / raw["out"]
    for key in CONSTANT_KEYS:
        if key in raw:
            try:
                cfg.overrides[key] = float(raw[key])
            except ValueError:
                raise InputError(f"{path}: {key} must be a number, got {raw[key]!r}") from None

    fixed_source = cfg.delays is not None
    varying_source = cfg.delay_mode == "time-varying"
    if fixed_source and varying_source:
        raise InputError(f"{path}: give either a delay file or a time-varying sampler, not both")
    if not fixed_source and not varying_source:
        raise InputError(f"{path}: exactly one delay source required (delays file or time-varying sampler)")
    if varying_source and cfg.delay_bound is None:
        raise InputError(f"{path}: time-varying mode requires delay_bound")
    if cfg.interpretation not in ("own-w-once", "literal-eq4", "matrix-consistent"):
        raise InputError(f"{path}: unknown interpretation {cfg.interpretation!r}")
    if cfg.algorithm in ("radd-opt-mp", "radd-opt-matrix", "add-opt") and cfg.alpha is None:
        raise InputError(f"{path}: algorithm {cfg.algorithm!r} requires an alpha setting")
    if cfg.algorithm == "radd-opt-matrix" and varying_source:
        raise InputError(
            f"{path}: the matrix engine handles time-invariant delays only; "
            f"use radd-opt-mp for time-varying runs"
        )
    return cfg
