"""Discrete-step Markov simulation of the per-node binary compromise state.

Each node carries a binary state ``chi_v``; in a step of length ``dt`` a
secure node becomes compromised with probability ``dt * theta_v`` where

    theta_v = 1 - (1 - alpha_v) * prod_{u in N_v} (1 - gamma_uv * chi_u),

and a compromised node is cleaned with probability ``dt * beta_v``.  All
nodes update synchronously from the previous step's state, which makes the
transition rates random variables driven by the neighbors' states.

Randomness comes from the counter-based Philox generator keyed by the run
seed with the step index in the counter, so the uniform draw for (run,
step, node) is addressable directly: results are bit-identical no matter
how runs or node updates are scheduled.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import ModelParams, Trajectory, _bind, _check_state, _theta
from .graph import AttackGraph

__all__ = [
    "StochasticRun",
    "EnsembleReport",
    "simulate_markov",
    "run_ensemble",
    "agreement_stats",
]

_DRAW_STEP = 0        # per-step flip uniforms
_DRAW_INIT_PROB = 1   # per-node initial compromise probabilities
_DRAW_INIT_STATE = 2  # per-node initial state coin


def _uniforms(seed: int, step: int, purpose: int, n: int) -> np.ndarray:
    """The addressable uniform block for (seed, step, purpose), one per node."""
    bitgen = np.random.Philox(
        counter=[0, int(step), int(purpose), 0],
        key=[int(seed) & 0xFFFFFFFFFFFFFFFF, 0],
    )
    return np.random.Generator(bitgen).random(n)


@dataclass(frozen=True)
class StochasticRun:
    """One realization of the chain, recorded on a uniform grid."""

    seed: int
    dt: float
    times: np.ndarray
    chi: np.ndarray       # (T, n) uint8
    fraction: np.ndarray  # (T,) compromised fraction, mean of chi per time

    @property
    def n_nodes(self) -> int:
        return self.chi.shape[1]


def simulate_markov(
    g: AttackGraph,
    params: ModelParams,
    i0,
    dt: float,
    t_end: float,
    seed: int,
    record_stride: int = 1,
) -> StochasticRun:
    """Simulate one run; fully deterministic given ``seed``.

    Initial states are drawn per node as Bernoulli(``i0_v``).  ``dt`` must
    not exceed 1 so that every per-step flip probability ``dt * theta`` and
    ``dt * beta`` stays inside [0, 1].

    Raises
    ------
    ValueError
        If ``dt`` would push a flip probability above 1 (use a smaller dt).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if dt > 1.0:
        raise ValueError(
            f"dt={dt} can make per-step probabilities dt*theta exceed 1; use dt <= 1"
        )
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if record_stride < 1:
        raise ValueError("record_stride must be >= 1")
    x0 = _check_state(i0, g.n)
    b = _bind(g, params)

    chi = (_uniforms(seed, 0, _DRAW_INIT_STATE, g.n) < x0).astype(np.uint8)
    n_steps = max(1, int(round(t_end / dt)))

    times = [0.0]
    states = [chi.copy()]
    for step in range(1, n_steps + 1):
        theta = _theta(b, chi.astype(np.float64))
        p_flip = np.where(chi == 1, dt * b.beta, dt * theta)
        u = _uniforms(seed, step, _DRAW_STEP, g.n)
        chi = np.where(u < p_flip, 1 - chi, chi).astype(np.uint8)
        if step % record_stride == 0 or step == n_steps:
            times.append(step * dt)
            states.append(chi.copy())

    chi_rec = np.asarray(states)
    return StochasticRun(
        seed=int(seed),
        dt=dt,
        times=np.asarray(times),
        chi=chi_rec,
        fraction=chi_rec.mean(axis=1),
    )


def _run_seed(master_seed: int, k: int) -> int:
    return int(
        np.random.SeedSequence(entropy=[int(master_seed), int(k)]).generate_state(
            1, np.uint64
        )[0]
    )


def run_ensemble(
    g: AttackGraph,
    params: ModelParams,
    runs: int,
    dt: float,
    t_end: float,
    init_interval: tuple[float, float],
    master_seed: int,
    record_stride: int = 1,
) -> list[StochasticRun]:
    """Independent runs, each with freshly drawn initial probabilities.

    Run ``k`` uses a seed derived deterministically from
    ``(master_seed, k)``; it draws ``i_v(0) ~ Uniform[lo, hi]`` per node and
    then the initial states as Bernoulli(``i_v(0)``).
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    lo, hi = float(init_interval[0]), float(init_interval[1])
    if not (0.0 <= lo <= hi <= 1.0):
        raise ValueError("init_interval must satisfy 0 <= lo <= hi <= 1")
    out = []
    for k in range(runs):
        seed = _run_seed(master_seed, k)
        i0 = lo + (hi - lo) * _uniforms(seed, 0, _DRAW_INIT_PROB, g.n)
        out.append(
            simulate_markov(g, params, i0, dt, t_end, seed, record_stride=record_stride)
        )
    return out


@dataclass(frozen=True)
class EnsembleReport:
    """Across-run summary and the model-agreement statistics.

    For each sampled time the per-run deviation from the deterministic
    prediction is ``d_k(t) = sum_v |chi_v(t) - i_v(t)| / n``; ``m`` and
    ``sd`` are the mean and standard deviation over the window of the
    across-run standard deviations of ``d_k(t)``.
    """

    runs: int
    times: np.ndarray
    mean_fraction: np.ndarray
    m: float
    sd: float
    window: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "window": list(self.window),
            "m": self.m,
            "sd": self.sd,
        }


def _nearest_indices(ode_times: np.ndarray, wanted: np.ndarray, half_gap: float) -> np.ndarray:
    idx = np.searchsorted(ode_times, wanted)
    idx = np.clip(idx, 0, len(ode_times) - 1)
    left = np.clip(idx - 1, 0, len(ode_times) - 1)
    use_left = np.abs(ode_times[left] - wanted) < np.abs(ode_times[idx] - wanted)
    idx = np.where(use_left, left, idx)
    gaps = np.abs(ode_times[idx] - wanted)
    if np.any(gaps > half_gap + 1e-9):
        worst = float(wanted[np.argmax(gaps)])
        raise ValueError(
            f"trajectory has no sample within half a step of t={worst:.6g}; "
            "align the recording grids"
        )
    return idx


def agreement_stats(
    runs: Sequence[StochasticRun],
    ode_traj: Trajectory | Sequence[Trajectory],
    window: tuple[float, float],
) -> EnsembleReport:
    """Per-time deviation statistics between an ensemble and the model.

    A single trajectory is compared against every run (the usual choice
    post-burn-in, where the globally stable model has forgotten its initial
    state); a sequence of trajectories, one per run, compares each run
    against its own prediction.

    Raises
    ------
    ValueError
        If the window contains no recorded samples or lies outside the
        trajectory's time range.
    """
    if len(runs) == 0:
        raise ValueError("need at least one run")
    times = runs[0].times
    for r in runs[1:]:
        if not np.array_equal(r.times, times):
            raise ValueError("all runs must share one recording grid")
    lo, hi = float(window[0]), float(window[1])
    if lo > hi:
        raise ValueError("window must satisfy lo <= hi")
    sel = (times >= lo - 1e-9) & (times <= hi + 1e-9)
    if not np.any(sel):
        raise ValueError(f"no recorded samples inside window [{lo}, {hi}]")
    sel_times = times[sel]

    if isinstance(ode_traj, Trajectory):
        trajectories: list[Trajectory] = [ode_traj] * len(runs)
    else:
        trajectories = list(ode_traj)
        if len(trajectories) != len(runs):
            raise ValueError("need one trajectory per run (or a single one)")

    half_gap = (times[1] - times[0]) / 2.0 if len(times) > 1 else np.inf
    deviations = np.empty((len(runs), sel_times.size))
    for k, (run, traj) in enumerate(zip(runs, trajectories)):
        if sel_times[0] < traj.times[0] - 1e-9 or sel_times[-1] > traj.times[-1] + 1e-9:
            raise ValueError("window extends beyond the trajectory")
        idx = _nearest_indices(traj.times, sel_times, half_gap)
        model_states = traj.states[idx]
        deviations[k] = np.abs(run.chi[sel] - model_states).mean(axis=1)

    sigma = deviations.std(axis=0)  # across runs, population convention
    mean_fraction = np.mean([r.fraction for r in runs], axis=0)
    return EnsembleReport(
        runs=len(runs),
        times=times,
        mean_fraction=mean_fraction,
        m=float(sigma.mean()),
        sd=float(sigma.std()),
        window=(lo, hi),
    )
