"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed input file or run configuration.

    Messages carry ``path:line`` context wherever a file is involved so the
    CLI can surface actionable diagnostics (exit code 1).
    """


class NotStronglyConnectedError(InputError):
    """An operation that requires strong connectivity got a graph without it."""


class AnalysisError(RuntimeError):
    """A spectral or stationary-vector computation failed or produced
    out-of-range results (e.g. contraction factor >= 1)."""


class DivergenceError(RuntimeError):
    """Simulation state blew past the divergence guard."""

    def __init__(self, step: int, magnitude: float):
        self.step = step
        self.magnitude = magnitude
        super().__init__(
            f"state diverged at step {step}: magnitude {magnitude:.3e} "
            f"exceeds guard (non-finite or > 1e12)"
        )
