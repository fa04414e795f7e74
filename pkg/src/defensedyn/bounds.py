"""Invariant-region constants and closed-form trajectory envelopes.

Every trajectory is eventually trapped: with pull-based attacks present
(``alpha > 0``) the box ``[eps, 1 - eps]^n`` is attracting for any
``eps`` below ``min(1/2, beta/(beta+1), alpha/(alpha+beta))``; with
``alpha = 0`` the one-sided box ``[0, 1 - eps]^n`` attracts for ``eps``
below ``min(1/2, beta/(beta+1))``.

Between the trajectory extrema ``i_min <= i_v(t) <= i_max`` the per-node
compromise pressure is pinned to ``[Q_v, P_v]`` with

    P_v = 1 - (1 - alpha_v) * (1 - gamma i_max)^{d_v}
    Q_v = 1 - (1 - alpha_v) * (1 - gamma i_min)^{d_v}

(``d_v`` the in-degree; isolated-input nodes get ``P_v = Q_v = alpha_v``,
and ``Q_v`` collapses to zero below the spectral threshold when
``alpha = 0``, where the trajectory dies out).  Comparison against the
linear systems with frozen rates then sandwiches the trajectory between
two exponentials::

    lower_v(t) = (i_v(0) - Q_v/(b+P_v)) exp(-(b+P_v) t) + Q_v/(b+P_v)
    upper_v(t) = (i_v(0) - P_v/(b+Q_v)) exp(-(b+Q_v) t) + P_v/(b+Q_v)

An optional per-degree geometric factor ``(1/d_v)^(1/d_v)`` can be applied
to the ``Q_v`` product (``geometric_factor=True``).  It yields visibly
tighter curves but is only heuristic: when all of a node's in-neighbors sit
near ``i_min`` simultaneously the factored ``Q_v`` overshoots the real
pressure and the lower envelope can cross the trajectory, so the guaranteed
factor-free form is the default.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .dynamics import ModelParams, Trajectory, _bind, _check_state
from .graph import AttackGraph
from .spectral import Regime, SpectralReport

__all__ = [
    "BoundMode",
    "BoundsEnvelope",
    "EpsilonBox",
    "lemma2_epsilon",
    "compute_PQ",
    "envelope_at",
    "envelope_curves",
    "trajectory_extrema",
    "make_envelope",
]


class BoundMode(str, Enum):
    EMPIRICAL = "Empirical"  # extrema measured on an integrated trajectory
    APRIORI = "APriori"      # extrema pinned to 0 and 1
    BASELINE = "Baseline"    # 0/1 extrema, geometric factor never applied


class EpsilonBox(NamedTuple):
    epsilon_star: float
    box: str


def lemma2_epsilon(params: ModelParams) -> EpsilonBox:
    """Cap on the half-width of the attracting box, and the box shape.

    Heterogeneous rates take the minimum over nodes.  With any zero pull
    rate only the one-sided box applies.
    """
    alpha = np.atleast_1d(np.asarray(params.alpha, dtype=np.float64))
    beta = np.atleast_1d(np.asarray(params.beta, dtype=np.float64))
    if np.all(alpha > 0.0):
        eps = min(0.5, float((beta / (beta + 1.0)).min()), float((alpha / (alpha + beta)).min()))
        return EpsilonBox(eps, "[eps, 1-eps]^n")
    eps = min(0.5, float((beta / (beta + 1.0)).min()))
    return EpsilonBox(eps, "[0, 1-eps]^n")


@dataclass(frozen=True)
class BoundsEnvelope:
    """Per-node envelope coefficients; ``Q <= P`` holds in the default
    factor-free form whenever ``i_min <= i_max``."""

    P: np.ndarray
    Q: np.ndarray
    i_min: float
    i_max: float
    mode: BoundMode


def _per_node_gamma_extremes(g: AttackGraph, b) -> tuple[np.ndarray, np.ndarray]:
    """Min and max in-edge gamma per node (1.0 placeholder on empty rows)."""
    gmin = np.ones(g.n)
    gmax = np.ones(g.n)
    starts = g.indptr[:-1]
    nonempty = starts < g.indptr[1:]
    if b.gamma_e.size:
        gmin[nonempty] = np.minimum.reduceat(b.gamma_e, starts[nonempty])
        gmax[nonempty] = np.maximum.reduceat(b.gamma_e, starts[nonempty])
    return gmin, gmax


def compute_PQ(
    g: AttackGraph,
    params: ModelParams,
    i_min: float,
    i_max: float,
    regime: SpectralReport | Regime,
    mode: BoundMode = BoundMode.EMPIRICAL,
    geometric_factor: bool = False,
) -> BoundsEnvelope:
    """Per-node envelope coefficients for given trajectory extrema.

    With all pull rates zero and the regime at or below threshold the
    trajectory dies out: ``Q`` collapses to zero so the lower envelope is
    the pure die-out decay, and ``P`` (which tends to zero together with
    the trajectory's own ``i_max``) keeps the general form so the upper
    envelope stays above the trajectory at every time.  Heterogeneous
    per-edge rates use the max in-edge gamma for ``P_v`` and the min for
    ``Q_v``, which keeps the sandwich conservative.

    Raises
    ------
    ValueError
        If ``i_min > i_max`` or either lies outside [0, 1].
    """
    if not (0.0 <= i_min <= i_max <= 1.0):
        raise ValueError("need 0 <= i_min <= i_max <= 1")
    regime_tag = regime.regime if isinstance(regime, SpectralReport) else regime
    b = _bind(g, params)
    dying_out = params.all_alpha_zero and regime_tag is not Regime.ABOVE_THRESHOLD

    d = g.in_degrees.astype(np.float64)
    gmin, gmax = _per_node_gamma_extremes(g, b)
    factor = np.ones(g.n)
    if geometric_factor and mode is not BoundMode.BASELINE:
        pos = d > 0
        factor[pos] = (1.0 / d[pos]) ** (1.0 / d[pos])

    P = 1.0 - b.one_minus_alpha * (1.0 - gmax * i_max) ** d
    Q = 1.0 - b.one_minus_alpha * factor * (1.0 - gmin * i_min) ** d
    isolated = d == 0
    P[isolated] = b.alpha[isolated]
    Q[isolated] = b.alpha[isolated]
    if dying_out:
        # the trajectory collapses to the origin, so zero compromise pressure
        # is a valid floor and pins the lower envelope onto the die-out decay;
        # P keeps its general value (it tends to zero with i_max itself), since
        # a zero ceiling would make the upper envelope undercut the trajectory
        Q = np.zeros(g.n)
    return BoundsEnvelope(P=P, Q=Q, i_min=i_min, i_max=i_max, mode=mode)


def envelope_at(env: BoundsEnvelope, i0, beta, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the lower and upper envelope vectors at time ``t >= 0``.

    ``beta`` may be a scalar or a per-node array.  At ``t = 0`` both
    envelopes equal ``i0``; as ``t`` grows they approach ``Q/(beta+P)`` and
    ``P/(beta+Q)`` respectively.  Values are clipped into [0, 1], which the
    state box makes valid and keeps the asymptotes inside the unit interval.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    i0 = np.asarray(i0, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    lower_inf = env.Q / (beta + env.P)
    upper_inf = env.P / (beta + env.Q)
    lower = (i0 - lower_inf) * np.exp(-(beta + env.P) * t) + lower_inf
    upper = (i0 - upper_inf) * np.exp(-(beta + env.Q) * t) + upper_inf
    return np.clip(lower, 0.0, 1.0), np.clip(upper, 0.0, 1.0)


def envelope_curves(
    env: BoundsEnvelope, i0, beta, times
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`envelope_at` over a time grid; shapes (T, n)."""
    times = np.asarray(times, dtype=np.float64)
    if times.size and times.min() < 0:
        raise ValueError("times must be nonnegative")
    i0 = np.asarray(i0, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    lower_inf = env.Q / (beta + env.P)
    upper_inf = env.P / (beta + env.Q)
    decay_l = np.exp(-np.outer(times, beta + env.P))
    decay_u = np.exp(-np.outer(times, beta + env.Q))
    lower = (i0 - lower_inf) * decay_l + lower_inf
    upper = (i0 - upper_inf) * decay_u + upper_inf
    return np.clip(lower, 0.0, 1.0), np.clip(upper, 0.0, 1.0)


def trajectory_extrema(traj: Trajectory) -> tuple[float, float]:
    """Global min and max of the recorded states over all nodes and times."""
    if len(traj.states) == 0:
        raise ValueError("trajectory is empty")
    return float(traj.states.min()), float(traj.states.max())


def make_envelope(
    g: AttackGraph,
    params: ModelParams,
    regime: SpectralReport | Regime,
    mode: BoundMode | str = BoundMode.EMPIRICAL,
    trajectory: Trajectory | None = None,
    geometric_factor: bool = False,
) -> BoundsEnvelope:
    """Build an envelope in one of the three extrema modes.

    ``Empirical`` reads ``(i_min, i_max)`` off an integrated trajectory and
    needs one; ``APriori`` and ``Baseline`` pin them to (0, 1).  The
    ``Baseline`` mode additionally never applies the geometric factor, so it
    reproduces the coarse degree-blind coefficients older analyses used.
    """
    mode = BoundMode(mode)
    if mode is BoundMode.EMPIRICAL:
        if trajectory is None:
            raise ValueError("Empirical mode needs a trajectory")
        i_min, i_max = trajectory_extrema(trajectory)
    else:
        i_min, i_max = 0.0, 1.0
    return compute_PQ(
        g, params, i_min, i_max, regime, mode=mode, geometric_factor=geometric_factor
    )
