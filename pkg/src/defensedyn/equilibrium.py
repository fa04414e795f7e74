"""Fixed-point computation of the unique equilibrium and empirical stability checks.

At an equilibrium the per-node balance ``beta_v i_v = theta_v(i) (1 - i_v)``
rearranges to the self-map

    T(i)_v = theta_v(i) / (beta_v + theta_v(i)),

whose fixed points are exactly the equilibria.  ``T`` is monotone (the flow
is cooperative) and ``T(1) <= 1``, so iterating from the all-ones vector
produces a componentwise non-increasing sequence converging to the largest
fixed point, which is the global attractor.  With all pull rates zero and
the spectral comparison at or below threshold the attractor is the origin
and is returned directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ModelParams, _bind, _check_state, _rhs, _theta, integrate
from .graph import AttackGraph
from .spectral import Regime, classify_regime

__all__ = [
    "EquilibriumResult",
    "EquilibriumError",
    "StabilityReport",
    "solve_equilibrium",
    "equilibrium_residual",
    "verify_global_stability",
]


class EquilibriumError(RuntimeError):
    """Fixed-point iteration ran out of iterations.

    Carries the last iterate and the last sup-norm change.
    """

    def __init__(self, last_iterate: np.ndarray, change: float, iterations: int):
        super().__init__(
            f"equilibrium iteration did not converge after {iterations} "
            f"iterations (last sup-norm change {change:.3g}); raise max_iter "
            "(convergence is slow near the spectral boundary)"
        )
        self.last_iterate = last_iterate
        self.change = change
        self.iterations = iterations


@dataclass(frozen=True)
class EquilibriumResult:
    """Equilibrium vector plus solver and regime diagnostics."""

    i_star: np.ndarray
    residual: float
    iterations: int
    regime: Regime
    stability_margin: float | None = None

    def to_dict(self, summary_threshold: int = 200) -> dict:
        """JSON-ready form; large vectors are summarized by mean/min/max."""
        out = {
            "regime": self.regime.value,
            "residual": self.residual,
            "iterations": self.iterations,
        }
        if self.stability_margin is not None:
            out["stability_margin"] = self.stability_margin
        if len(self.i_star) <= summary_threshold:
            out["i_star"] = [float(v) for v in self.i_star]
        else:
            out["i_star_summary"] = {
                "mean": float(self.i_star.mean()),
                "min": float(self.i_star.min()),
                "max": float(self.i_star.max()),
            }
        return out


def _lower_start(b) -> np.ndarray:
    # strictly inside the attracting box of the flow, so T moves it upward
    eps = np.minimum(0.5, np.minimum(b.beta / (b.beta + 1.0), b.alpha / (b.alpha + b.beta)))
    return 0.5 * float(eps.min()) * np.ones(b.g.n)


def solve_equilibrium(
    g: AttackGraph,
    params: ModelParams,
    tol: float = 1e-12,
    max_iter: int = 1_000_000,
    boundary_tol: float = 1e-6,
    start: str = "upper",
    with_margin: bool = False,
) -> EquilibriumResult:
    """Compute the unique global attractor of the dynamics.

    With all ``alpha_v = 0`` the regime is classified first; at or below the
    spectral threshold (within ``boundary_tol``) the exact answer is the
    origin and no iteration runs.  Otherwise the fixed-point map ``T`` is
    iterated from the all-ones vector (``start="upper"``) until the sup-norm
    change drops to ``tol``.  ``start="lower"`` instead iterates upward from
    a small positive vector, which brackets the equilibrium from below; it
    requires every ``alpha_v > 0``.

    Raises
    ------
    EquilibriumError
        When ``max_iter`` is exhausted; the exception carries the last
        iterate and change.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = _bind(g, params)

    regime: Regime | None = None
    if params.all_alpha_zero:
        if params.homogeneous:
            report = classify_regime(g, params, i_star=None, tol=boundary_tol)
        else:
            report = classify_regime(g, params, i_star=np.zeros(g.n), tol=boundary_tol)
        regime = report.regime
        if regime is not Regime.ABOVE_THRESHOLD:
            zero = np.zeros(g.n)
            result = EquilibriumResult(zero, 0.0, 0, regime)
            return _with_margin(g, params, result) if with_margin else result

    if start == "upper":
        x = np.ones(g.n)
    elif start == "lower":
        if np.any(b.alpha <= 0.0):
            raise ValueError('start="lower" requires alpha > 0 on every node')
        x = _lower_start(b)
    else:
        raise ValueError('start must be "upper" or "lower"')

    iterations = 0
    change = np.inf
    for iterations in range(1, max_iter + 1):
        theta = _theta(b, x)
        x_new = theta / (b.beta + theta)
        change = float(np.max(np.abs(x_new - x)))
        x = x_new
        if change <= tol:
            break
    else:
        raise EquilibriumError(x, change, max_iter)

    if regime is None:
        regime = classify_regime(g, params, i_star=x, tol=boundary_tol).regime
    residual = float(np.max(np.abs(_rhs(b, x))))
    result = EquilibriumResult(x, residual, iterations, regime)
    return _with_margin(g, params, result) if with_margin else result


def _with_margin(g, params, result: EquilibriumResult) -> EquilibriumResult:
    from .convergence import stability_margin  # local import avoids a cycle

    margin = stability_margin(g, params, result.i_star)
    return EquilibriumResult(
        result.i_star, result.residual, result.iterations, result.regime, margin
    )


def equilibrium_residual(g: AttackGraph, params: ModelParams, i) -> float:
    """Sup-norm of the vector field at ``i``; zero exactly at equilibria."""
    x = _check_state(i, g.n)
    return float(np.max(np.abs(_rhs(_bind(g, params), x))))


@dataclass(frozen=True)
class StabilityReport:
    """Whether trajectories from scattered starts collapse onto one point."""

    passed: bool
    max_pairwise_gap: float
    max_gap_to_fixed_point: float
    i_star: np.ndarray
    trials: int
    t_end: float
    tol: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_pairwise_gap": self.max_pairwise_gap,
            "max_gap_to_fixed_point": self.max_gap_to_fixed_point,
            "trials": self.trials,
            "t_end": self.t_end,
            "tol": self.tol,
        }


def verify_global_stability(
    g: AttackGraph,
    params: ModelParams,
    trials: int,
    t_end: float,
    tol: float,
    seed: int,
    step: float = 0.05,
    corner_offset: float = 1e-3,
) -> StabilityReport:
    """Integrate from ``trials`` random starts plus near-corner starts.

    The near-origin and near-all-ones corners are offset inward by
    ``corner_offset`` (the exact origin is itself an equilibrium when all
    pull rates are zero).  PASS means the final states agree pairwise and
    with the fixed-point solver's answer to within ``tol`` in sup-norm.
    """
    if trials < 2:
        raise ValueError("trials must be >= 2")
    rng = np.random.default_rng(seed)
    starts = [rng.random(g.n) for _ in range(trials)]
    starts.append(np.full(g.n, corner_offset))
    starts.append(np.full(g.n, 1.0 - corner_offset))

    n_steps = max(1, int(round(t_end / step)))
    finals = np.stack(
        [
            integrate(g, params, x0, t_end, step=step, stride=n_steps).final_state()
            for x0 in starts
        ]
    )
    gaps = np.abs(finals[:, None, :] - finals[None, :, :]).max(axis=2)
    max_pairwise = float(gaps.max())

    result = solve_equilibrium(g, params)
    max_to_star = float(np.max(np.abs(finals - result.i_star[None, :])))
    return StabilityReport(
        passed=bool(max_pairwise <= tol and max_to_star <= tol),
        max_pairwise_gap=max_pairwise,
        max_gap_to_fixed_point=max_to_star,
        i_star=result.i_star,
        trials=trials,
        t_end=t_end,
        tol=tol,
    )
