"""Compromise-probability dynamics on an attack graph.

Each node ``v`` carries a probability ``i_v(t)`` of being compromised.  A
secure node is compromised through pull-based attacks (rate ``alpha_v``) or
by compromised in-neighbors (per-edge success probability ``gamma_uv``),
and a compromised node is cleaned by reactive defense (rate ``beta_v``)::

    di_v/dt = -beta_v * i_v + theta_v(i) * (1 - i_v)
    theta_v(i) = 1 - (1 - alpha_v) * prod_{u in N_v} (1 - gamma_uv * i_u)

Homogeneous (scalar) and heterogeneous (per-node / per-edge) parameters
share one code path; scalars broadcast.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .graph import AttackGraph, row_products, row_sums

__all__ = [
    "ModelParams",
    "Trajectory",
    "IntegrationError",
    "theta_infection",
    "rhs",
    "jacobian",
    "integrate",
]


def _validate_range(name: str, value, lo: float, hi: float, lo_open: bool) -> None:
    arr = np.asarray(value, dtype=np.float64)
    bad = (arr < lo) | (arr > hi) | ((arr == lo) if lo_open else False)
    if np.any(bad):
        bound = f"({lo}, {hi}]" if lo_open else f"[{lo}, {hi}]"
        raise ValueError(f"{name} must lie in {bound}")


@dataclass(frozen=True)
class ModelParams:
    """Attack/defense rates, scalar or heterogeneous.

    Parameters
    ----------
    alpha : float or (n,) array
        Pull-based compromise probability per node, in [0, 1].
    beta : float or (n,) array
        Reactive cleaning probability per node, in (0, 1].
    gamma : float or mapping ``(u, v) -> float``
        Push-based success probability per directed edge ``u -> v``, in
        (0, 1].  A mapping must cover exactly the edges of the graph used
        (both orientations for undirected graphs).
    """

    alpha: float | np.ndarray
    beta: float | np.ndarray
    gamma: float | Mapping[tuple[int, int], float]

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not np.isscalar(value):
                arr = np.asarray(value, dtype=np.float64)
                arr.flags.writeable = False
                object.__setattr__(self, name, arr)
        _validate_range("alpha", self.alpha, 0.0, 1.0, lo_open=False)
        _validate_range("beta", self.beta, 0.0, 1.0, lo_open=True)
        if isinstance(self.gamma, Mapping):
            _validate_range("gamma", list(self.gamma.values()), 0.0, 1.0, lo_open=True)
        else:
            _validate_range("gamma", self.gamma, 0.0, 1.0, lo_open=True)

    @property
    def homogeneous(self) -> bool:
        """True when every per-node / per-edge value is a single constant."""
        parts = []
        for value in (self.alpha, self.beta):
            arr = np.asarray(value, dtype=np.float64).ravel()
            if arr.size > 1 and not np.all(arr == arr[0]):
                return False
            parts.append(arr[0] if arr.size else None)
        if isinstance(self.gamma, Mapping):
            vals = np.asarray(list(self.gamma.values()), dtype=np.float64)
            return bool(vals.size == 0 or np.all(vals == vals[0]))
        return True

    @property
    def all_alpha_zero(self) -> bool:
        return bool(np.all(np.asarray(self.alpha) == 0.0))

    def alpha_vector(self, n: int) -> np.ndarray:
        return _per_node(self.alpha, n, "alpha")

    def beta_vector(self, n: int) -> np.ndarray:
        return _per_node(self.beta, n, "beta")

    def gamma_edges(self, g: AttackGraph) -> np.ndarray:
        """Per-edge gamma aligned with the graph's in-neighbor CSR order."""
        m = g.indices.size
        if not isinstance(self.gamma, Mapping):
            return np.full(m, float(self.gamma))
        rows = np.repeat(np.arange(g.n), np.diff(g.indptr))
        out = np.empty(m, dtype=np.float64)
        for e, (u, v) in enumerate(zip(g.indices.tolist(), rows.tolist())):
            try:
                out[e] = self.gamma[(u, v)]
            except KeyError:
                raise ValueError(f"gamma mapping is missing edge ({u}, {v})") from None
        if len(self.gamma) != m:
            extra = set(self.gamma) - set(zip(g.indices.tolist(), rows.tolist()))
            raise ValueError(f"gamma mapping has entries for non-edges: {sorted(extra)[:5]}")
        return out


def _per_node(value, n: int, name: str) -> np.ndarray:
    if np.isscalar(value):
        return np.full(n, float(value))
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (n,):
        raise ValueError(f"{name} must be scalar or shape ({n},), got {arr.shape}")
    return arr


class _Bound:
    """Parameters broadcast against one graph, ready for the kernels."""

    __slots__ = ("g", "alpha", "one_minus_alpha", "beta", "gamma_e")

    def __init__(self, g: AttackGraph, params: ModelParams):
        self.g = g
        self.alpha = params.alpha_vector(g.n)
        self.one_minus_alpha = 1.0 - self.alpha
        self.beta = params.beta_vector(g.n)
        self.gamma_e = params.gamma_edges(g)


def _bind(g: AttackGraph, params: ModelParams) -> _Bound:
    return _Bound(g, params)


def _theta(b: _Bound, x: np.ndarray) -> np.ndarray:
    """theta_v = 1 - (1 - alpha_v) * prod_{u in N_v} (1 - gamma_uv * x_u)."""
    factors = 1.0 - b.gamma_e * x[b.g.indices]
    return 1.0 - b.one_minus_alpha * row_products(b.g.indptr, factors)


def _rhs(b: _Bound, x: np.ndarray) -> np.ndarray:
    return -b.beta * x + _theta(b, x) * (1.0 - x)


def _check_state(x, n: int) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (n,):
        raise ValueError(f"state must have shape ({n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("state entries must lie in [0, 1]")
    return arr


def theta_infection(g: AttackGraph, params: ModelParams, state, v: int) -> float:
    """Probability that secure node ``v`` becomes compromised, given ``state``.

    An empty in-neighborhood leaves only the pull-based channel, so the
    result is ``alpha_v``.
    """
    x = _check_state(state, g.n)
    b = _bind(g, params)
    return float(_theta(b, x)[v])


def rhs(g: AttackGraph, params: ModelParams, state) -> np.ndarray:
    """Time derivative of the compromise probabilities at ``state``."""
    x = _check_state(state, g.n)
    return _rhs(_bind(g, params), x)


def _jacobian_parts(b: _Bound, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Off-diagonal CSR data (aligned with the in-neighbor arrays) and diagonal.

    Entry (v, u) for ``u in N_v`` is
    ``(1 - alpha_v) * gamma_uv * prod_{w in N_v, w != u} (1 - gamma_wv x_w) * (1 - x_v)``;
    the diagonal is ``-beta_v - theta_v(x)``.
    """
    g = b.g
    factors = 1.0 - b.gamma_e * x[g.indices]
    zero = factors == 0.0
    nonzero_prod = row_products(g.indptr, np.where(zero, 1.0, factors))
    zero_count = row_sums(g.indptr, zero.astype(np.float64))

    lengths = np.diff(g.indptr)
    prod_e = np.repeat(nonzero_prod, lengths)
    zc_e = np.repeat(zero_count, lengths)
    # product over the other factors in the row: divide out when no factor is
    # zero, otherwise only the single zero factor's slot survives
    with np.errstate(divide="ignore", invalid="ignore"):
        excl = np.where(
            zc_e == 0.0,
            prod_e / np.where(zero, 1.0, factors),
            np.where((zc_e == 1.0) & zero, prod_e, 0.0),
        )
    one_minus_alpha_e = np.repeat(b.one_minus_alpha, lengths)
    x_row = np.repeat(x, lengths)
    data = one_minus_alpha_e * b.gamma_e * excl * (1.0 - x_row)
    diag = -b.beta - _theta(b, x)
    return data, diag


def jacobian(g: AttackGraph, params: ModelParams, state) -> sp.csr_matrix:
    """Sparse Jacobian of :func:`rhs` at ``state``.

    Off-diagonal entries are nonnegative for any valid state, which is what
    makes the flow monotone (cooperative).
    """
    x = _check_state(state, g.n)
    data, diag = _jacobian_parts(_bind(g, params), x)
    off = sp.csr_matrix((data, g.indices.copy(), g.indptr.copy()), shape=(g.n, g.n))
    return (off + sp.diags(diag, format="csr")).tocsr()


class IntegrationError(RuntimeError):
    """Non-finite value produced during integration; carries the time."""

    def __init__(self, t: float):
        super().__init__(f"non-finite state encountered at t={t:.6g}")
        self.t = t


@dataclass(frozen=True)
class Trajectory:
    """Recorded solution of the dynamics.

    ``times`` is strictly increasing; ``states[k]`` is the state at
    ``times[k]`` and always lies in ``[0, 1]^n``.  ``clamp_events`` counts
    integration steps whose result had to be clipped back into the unit box
    (a round-off diagnostic; analytically the box is invariant).
    """

    times: np.ndarray
    states: np.ndarray
    params: ModelParams
    graph: AttackGraph
    clamp_events: int = 0

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def n_nodes(self) -> int:
        return self.states.shape[1]

    def mean_series(self) -> np.ndarray:
        """Node-averaged compromise probability at each recorded time."""
        return self.states.mean(axis=1)

    def final_state(self) -> np.ndarray:
        return self.states[-1]


def integrate(
    g: AttackGraph,
    params: ModelParams,
    i0,
    t_end: float,
    step: float = 0.01,
    stride: int = 1,
) -> Trajectory:
    """Integrate the dynamics with the classical fixed-step order-4 scheme.

    The step count is ``round(t_end / step)`` and the actual uniform step is
    ``t_end / steps`` (equal to ``step`` whenever ``step`` divides ``t_end``).
    States are recorded at ``t = 0`` and every ``stride``-th step; the final
    state is always recorded.  Each accepted state is clipped into
    ``[0, 1]^n`` to absorb round-off.

    Raises
    ------
    IntegrationError
        If a non-finite value appears (unreachable for valid inputs; treated
        as an internal-consistency alarm).
    """
    if step <= 0 or t_end <= 0:
        raise ValueError("step and t_end must be positive")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    x = _check_state(i0, g.n)
    b = _bind(g, params)

    n_steps = max(1, int(round(t_end / step)))
    h = t_end / n_steps

    times = [0.0]
    states = [x.copy()]
    clamp_events = 0
    for k in range(1, n_steps + 1):
        k1 = _rhs(b, x)
        k2 = _rhs(b, x + (0.5 * h) * k1)
        k3 = _rhs(b, x + (0.5 * h) * k2)
        k4 = _rhs(b, x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise IntegrationError(k * h)
        clipped = np.clip(x, 0.0, 1.0)
        if not np.array_equal(clipped, x):
            clamp_events += 1
        x = clipped
        if k % stride == 0 or k == n_steps:
            times.append(k * h)
            states.append(x.copy())

    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        params=params,
        graph=g,
        clamp_events=clamp_events,
    )
