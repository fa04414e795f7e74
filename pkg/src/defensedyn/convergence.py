"""Convergence-speed estimation: polynomial versus exponential approach.

The indicator

    S(t) = (1/t) * log( sum_v |i_v(t + dt) - i_v(t)| / dt )

tends to 0 for polynomially converging trajectories and to a negative
constant (the decay rate) for exponentially converging ones.  The verdict
is obtained by least-squares fitting the tail of the series against the two
asymptotic shapes: ``a + b/t`` (exponential, limit ``a``) and
``(b + c log t)/t`` (polynomial, limit 0).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import ModelParams, Trajectory, _bind, _check_state, _jacobian_parts
from .graph import AttackGraph
from .spectral import _perron

__all__ = [
    "SpeedSeries",
    "SpeedVerdict",
    "ConvergenceKind",
    "speed_indicator",
    "classify_convergence",
    "stability_margin",
]

# differences below this are considered converged-to-working-precision and
# truncate the series, preventing log-of-zero artifacts
DIFFERENCE_FLOOR = 1e-14


@dataclass(frozen=True)
class SpeedSeries:
    """Speed indicator sampled on a uniform grid; may end early where the
    trajectory differences underflow."""

    times: np.ndarray
    S: np.ndarray
    dt_used: float

    def __len__(self) -> int:
        return len(self.times)


def speed_indicator(traj: Trajectory) -> SpeedSeries:
    """Evaluate the speed indicator on a uniformly recorded trajectory.

    The recorded spacing serves as the forward-difference step.  The sample
    at ``t = 0`` is skipped (the ``1/t`` prefactor is undefined there) and
    the series is truncated at the first sample whose summed absolute state
    difference falls below ``DIFFERENCE_FLOOR``.

    Raises
    ------
    ValueError
        If fewer than 2 samples are recorded or the spacing is non-uniform.
    """
    times = traj.times
    if len(times) < 2:
        raise ValueError("need at least 2 recorded samples")
    gaps = np.diff(times)
    dt = float(gaps[0])
    if np.any(np.abs(gaps - dt) > 1e-9 * max(1.0, abs(dt))):
        raise ValueError("trajectory samples are not uniformly spaced")

    diff_norms = np.abs(np.diff(traj.states, axis=0)).sum(axis=1)  # one per gap
    out_t: list[float] = []
    out_s: list[float] = []
    for k in range(len(diff_norms)):
        if diff_norms[k] < DIFFERENCE_FLOOR:
            break
        t = times[k]
        if t <= 0.0:
            continue
        out_t.append(float(t))
        out_s.append(float(np.log(diff_norms[k] / dt) / t))
    return SpeedSeries(np.asarray(out_t), np.asarray(out_s), dt)


class ConvergenceKind(str, Enum):
    POLYNOMIAL = "Polynomial"
    EXPONENTIAL = "Exponential"


@dataclass(frozen=True)
class SpeedVerdict:
    """Classification of the tail behavior with the evidence that produced it."""

    kind: ConvergenceKind
    rate: float | None
    window: tuple[float, float]
    evidence: dict

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "rate": self.rate,
            "window": list(self.window),
            "evidence": self.evidence,
        }


def _fit(design: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return coef, float(np.sqrt(np.mean(resid**2)))


def classify_convergence(
    series: SpeedSeries,
    tail_fraction: float = 0.25,
    poly_tol: float = 0.01,
) -> SpeedVerdict:
    """Decide Polynomial versus Exponential from the tail of the series.

    The exponential model ``S = a + b/t`` is fit over the last
    ``tail_fraction`` of the samples; a fitted limit above ``-poly_tol`` is
    indistinguishable from zero and yields ``Polynomial``, otherwise the
    verdict is ``Exponential`` with ``rate = a``.  One guarded override: a
    limit still in the gray zone (above ``-5 poly_tol``) whose zero-limit
    model fits decisively better (4x smaller residual) is classified
    ``Polynomial`` -- a genuinely exponential tail lies exactly in the
    exponential model's span, so it can never lose the residual comparison
    that badly.  The evidence records the tail mean and trend, both model
    residuals, and an ``inconclusive`` flag raised when the residuals
    prefer the opposite hypothesis or the fitted limit sits within a factor
    of two of the threshold.

    Raises
    ------
    ValueError
        If the series is empty or the tail holds fewer than 4 samples.
    """
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError("tail_fraction must lie in (0, 1]")
    if len(series) == 0:
        raise ValueError("speed series is empty")
    n_tail = max(int(np.ceil(len(series) * tail_fraction)), 4)
    if n_tail > len(series):
        raise ValueError(
            f"series too short for the tail window: need {n_tail} samples, have {len(series)}"
        )
    t = series.times[-n_tail:]
    s = series.S[-n_tail:]

    exp_coef, exp_resid = _fit(np.column_stack([np.ones_like(t), 1.0 / t]), s)
    poly_coef, poly_resid = _fit(np.column_stack([1.0 / t, np.log(t) / t]), s)
    limit = float(exp_coef[0])

    half = n_tail // 2
    tail_mean = float(s.mean())
    trend = float(s[half:].mean() - s[:half].mean())

    gray_zone_override = (
        -5.0 * poly_tol < limit <= -poly_tol and poly_resid < 0.25 * exp_resid
    )
    if limit > -poly_tol or gray_zone_override:
        kind, rate = ConvergenceKind.POLYNOMIAL, None
        inconsistent_fit = poly_resid > 1.5 * exp_resid
    else:
        kind, rate = ConvergenceKind.EXPONENTIAL, limit
        inconsistent_fit = exp_resid > 1.5 * poly_resid
    near_threshold = -2.0 * poly_tol < limit <= -0.5 * poly_tol
    evidence = {
        "tail_mean": tail_mean,
        "tail_trend": trend,
        "fitted_limit": limit,
        "exp_fit_rms": exp_resid,
        "poly_fit_rms": poly_resid,
        "n_tail": n_tail,
        "poly_tol": poly_tol,
        "fit_preference_override": bool(gray_zone_override),
        "inconclusive": bool(gray_zone_override or (inconsistent_fit and near_threshold)),
    }
    return SpeedVerdict(kind, rate, (float(t[0]), float(t[-1])), evidence)


def stability_margin(
    g: AttackGraph,
    params: ModelParams,
    i_star,
    tol: float = 1e-12,
    max_iter: int = 100_000,
) -> float:
    """Largest real part over the Jacobian spectrum at an equilibrium.

    The Jacobian has nonnegative off-diagonal entries, so shifting by
    ``(1 + max beta_v) I`` makes it entrywise nonnegative; its Perron root
    minus the shift is the sought margin.  Negative means the equilibrium
    attracts exponentially at that rate.
    """
    x = _check_state(i_star, g.n)
    b = _bind(g, params)
    data, diag = _jacobian_parts(b, x)
    shift = 1.0 + float(np.max(b.beta))
    lam, _ = _perron(g.n, g.indptr, g.indices, data, diag + shift, tol, max_iter)
    return lam - shift
