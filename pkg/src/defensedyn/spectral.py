"""Leading-eigenvalue machinery and parameter-regime classification.

The threshold between die-out and endemic behavior of the dynamics is a
spectral comparison: with no pull-based attacks (``alpha = 0``) the leading
adjacency eigenvalue is compared against ``beta / gamma``; otherwise the
leading eigenvalue of the composite matrix ``H + gamma (1 - alpha) A`` is
compared against 1, where ``H`` is diagonal with
``h_v = |-beta + (1 - alpha) prod_{u in N_v} (1 - gamma i*_u)|``.

Perron roots are computed by power iteration on ``M + I`` (the identity
shift defeats the oscillation of periodic adjacency patterns), applied per
strongly connected block of the nonzero pattern.  Restricting to blocks
keeps the dominant eigenvalue simple, so the iteration converges
geometrically even on reducible graphs where the global matrix has a
defective dominant eigenvalue; the global root is the maximum over blocks
and a matching nonnegative eigenvector is assembled by back-substitution
across the block ordering.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .dynamics import ModelParams, _bind, _check_state
from .graph import (
    AttackGraph,
    _order_components,
    _tarjan_scc,
    _transpose_csr,
    row_products,
    row_sums,
)

__all__ = [
    "Regime",
    "SpectralReport",
    "HMatrix",
    "PowerIterationError",
    "spectral_radius",
    "build_H",
    "classify_regime",
]


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge within the iteration budget.

    Carries the last eigenvalue estimate, the last relative change of the
    estimate, and the number of iterations performed.
    """

    def __init__(self, estimate: float, residual: float, iterations: int):
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(estimate {estimate:.12g}, last relative change {residual:.3g}); "
            "raise max_iter or loosen tol"
        )
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations


def _power_block(
    nb: int,
    indptr: np.ndarray,
    indices: np.ndarray,
    data: np.ndarray,
    diag: np.ndarray,
    tol: float,
    max_iter: int,
) -> tuple[float, np.ndarray]:
    """Perron root and 1-norm-unit eigenvector of one irreducible block."""
    if nb == 1:
        return float(diag[0]), np.ones(1)
    x = np.full(nb, 1.0 / nb)
    prev = np.inf
    streak = 0
    change = np.inf
    est = 0.0
    for it in range(1, max_iter + 1):
        y = diag * x + row_sums(indptr, data * x[indices]) + x  # (M + I) x
        est = float(x @ y) / float(x @ x)
        x = y / float(np.abs(y).sum())
        change = abs(est - prev) / max(1.0, abs(est))
        prev = est
        if change <= tol:
            streak += 1
            if streak >= 3:
                return est - 1.0, x
        else:
            streak = 0
    raise PowerIterationError(est - 1.0, change, max_iter)


def _perron(
    n: int,
    indptr: np.ndarray,
    indices: np.ndarray,
    data: np.ndarray,
    diag: np.ndarray,
    tol: float,
    max_iter: int,
) -> tuple[float, np.ndarray]:
    """Perron root and a nonnegative eigenvector of a nonnegative matrix.

    The matrix is given in in-neighbor CSR form: entry (v, u) holds
    ``data[e]`` for each stored edge ``e`` of row ``v``, plus ``diag`` on the
    diagonal.  Entries equal to zero are excluded from the connectivity
    pattern, so every diagonal block the iteration sees is irreducible.
    """
    keep = data != 0.0
    rows_all = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    rows = rows_all[keep]
    cols = indices[keep]
    vals = data[keep]

    counts = np.bincount(rows, minlength=n)
    f_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=f_indptr[1:])
    out_indptr, out_indices = _transpose_csr(n, f_indptr, cols)

    components = _tarjan_scc(n, out_indptr, out_indices)
    order = _order_components(n, f_indptr, cols, components)
    blocks = [components[k] for k in order]
    p = len(blocks)
    block_of = np.zeros(n, dtype=np.int64)
    for j, block in enumerate(blocks):
        block_of[block] = j
    local = np.zeros(n, dtype=np.int64)
    for block in blocks:
        local[block] = np.arange(len(block))

    # group intra-block edges by block, keeping row-major order inside a group
    row_blocks = block_of[rows]
    intra = row_blocks == block_of[cols]
    intra_order = np.argsort(row_blocks[intra], kind="stable")
    i_rows = rows[intra][intra_order]
    i_cols = cols[intra][intra_order]
    i_vals = vals[intra][intra_order]
    group_counts = np.bincount(row_blocks[intra], minlength=p)
    group_ends = np.cumsum(group_counts)

    lams = np.empty(p)
    vecs: list[np.ndarray] = []
    for j, block in enumerate(blocks):
        nb = len(block)
        lo, hi = group_ends[j] - group_counts[j], group_ends[j]
        b_rows = local[i_rows[lo:hi]]
        b_cols = local[i_cols[lo:hi]]
        b_indptr = np.zeros(nb + 1, dtype=np.int64)
        np.cumsum(np.bincount(b_rows, minlength=nb), out=b_indptr[1:])
        lam_j, vec_j = _power_block(
            nb, b_indptr, b_cols, i_vals[lo:hi], diag[block], tol, max_iter
        )
        lams[j] = lam_j
        vecs.append(vec_j)

    lam = float(lams.max())
    winner = int(np.argmax(lams == lam))

    x = np.zeros(n)
    x[blocks[winner]] = vecs[winner]
    if winner > 0:
        x = _complete_eigenvector(
            n, f_indptr, cols, vals, diag, blocks, block_of, winner, lam, x, max_iter
        )
    total = x.sum()
    return lam, x / total if total else x


def _complete_eigenvector(
    n, f_indptr, cols, vals, diag, blocks, block_of, winner, lam, x, max_iter
) -> np.ndarray:
    """Back-substitute the eigenvector into blocks earlier than the winner.

    Blocks are ordered so edges run from later blocks into earlier ones; for
    each block j before the (earliest-maximal) winner the restriction solves
    ``(lam I - M_jj) x_j = inflow_j``, done by the convergent fixed-point
    ``x_j <- (M_jj x_j + inflow_j) / lam`` since ``rho(M_jj) < lam``.
    """
    rows_all = np.repeat(np.arange(n, dtype=np.int64), np.diff(f_indptr))
    for j in range(winner - 1, -1, -1):
        block = blocks[j]
        mask_rows = block_of[rows_all] == j
        r = rows_all[mask_rows]
        c = cols[mask_rows]
        w = vals[mask_rows]
        external = block_of[c] != j
        inflow = np.zeros(n)
        np.add.at(inflow, r[external], w[external] * x[c[external]])
        inflow_b = inflow[block]
        if len(block) == 1:
            x[block] = inflow_b / (lam - diag[block])
            continue
        rb = r[~external]
        cb = c[~external]
        wb = w[~external]
        xb = inflow_b / lam
        lookup = np.zeros(n, dtype=np.int64)
        lookup[block] = np.arange(len(block))
        for _ in range(max_iter):
            acc = diag[block] * xb + inflow_b
            np.add.at(acc, lookup[rb], wb * xb[lookup[cb]])
            new = acc / lam
            delta = np.max(np.abs(new - xb))
            xb = new
            if delta <= 1e-15 * max(1.0, float(np.max(xb))):
                break
        x[block] = xb
    return x


def spectral_radius(
    g: AttackGraph,
    diag_shift: np.ndarray | None = None,
    edge_weight: float = 1.0,
    tol: float = 1e-12,
    max_iter: int = 100_000,
) -> tuple[float, np.ndarray]:
    """Perron root and eigenvector of ``D + w A`` for the attack graph.

    Parameters
    ----------
    diag_shift : (n,) nonnegative array, optional
        Diagonal ``D``; omitted means zero.
    edge_weight : nonnegative float
        Scalar weight ``w`` on every adjacency entry.
    tol : float
        Relative-change tolerance of the eigenvalue estimate; convergence
        requires three consecutive changes below it.

    Returns
    -------
    (eigenvalue, eigenvector)
        The eigenvector is nonnegative with unit 1-norm, strictly positive
        when the graph is strongly connected.

    Raises
    ------
    PowerIterationError
        When any block fails to converge within ``max_iter`` iterations.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if edge_weight < 0:
        raise ValueError("edge_weight must be nonnegative")
    if diag_shift is None:
        diag = np.zeros(g.n)
    else:
        diag = np.asarray(diag_shift, dtype=np.float64)
        if diag.shape != (g.n,):
            raise ValueError(f"diag_shift must have shape ({g.n},)")
        if diag.min() < 0:
            raise ValueError("diag_shift entries must be nonnegative")
    data = np.full(g.indices.size, float(edge_weight))
    return _perron(g.n, g.indptr, g.indices, data, diag, tol, max_iter)


@dataclass(frozen=True)
class HMatrix:
    """Diagonal of the composite-threshold matrix, one value per node."""

    h: np.ndarray


def build_H(params: ModelParams, g: AttackGraph, i_star) -> HMatrix:
    """Diagonal ``h_v = |-beta_v + (1 - alpha_v) prod_{u in N_v} (1 - gamma_uv i*_u)|``.

    An empty in-neighborhood contributes an empty product, i.e. 1.
    """
    x = _check_state(i_star, g.n)
    b = _bind(g, params)
    prod = row_products(g.indptr, 1.0 - b.gamma_e * x[g.indices])
    h = np.abs(-b.beta + b.one_minus_alpha * prod)
    h.flags.writeable = False
    return HMatrix(h=h)


class Regime(str, Enum):
    BELOW_THRESHOLD = "BelowThreshold"
    ON_BOUNDARY = "OnBoundary"
    ABOVE_THRESHOLD = "AboveThreshold"


@dataclass(frozen=True)
class SpectralReport:
    """Outcome of the threshold comparison.

    ``lambda_composite`` is present only when an equilibrium estimate was
    supplied (the composite-matrix condition needs one).
    """

    lambda_A1: float
    lambda_composite: float | None
    regime: Regime
    tolerance_used: float

    def to_dict(self) -> dict:
        return {
            "lambda_A1": self.lambda_A1,
            "lambda_composite": self.lambda_composite,
            "regime": self.regime.value,
            "tolerance_used": self.tolerance_used,
        }


def _homogeneous_scalar(value, name: str) -> float:
    if isinstance(value, Mapping):
        vals = np.asarray(list(value.values()), dtype=np.float64)
        if vals.size and np.all(vals == vals[0]):
            return float(vals[0])
        raise ValueError(
            f"{name} is heterogeneous; supply i_star so the composite "
            "condition can be used"
        )
    arr = np.asarray(value, dtype=np.float64).ravel()
    if arr.size == 1 or np.all(arr == arr[0]):
        return float(arr[0])
    raise ValueError(
        f"{name} is heterogeneous; supply i_star so the composite condition can be used"
    )


def _compare(lam: float, threshold: float, tol: float) -> Regime:
    band = tol * max(1.0, abs(threshold), abs(lam))
    if abs(lam - threshold) <= band:
        return Regime.ON_BOUNDARY
    return Regime.ABOVE_THRESHOLD if lam > threshold else Regime.BELOW_THRESHOLD


def classify_regime(
    g: AttackGraph,
    params: ModelParams,
    i_star=None,
    tol: float = 1e-6,
    power_tol: float = 1e-12,
    max_iter: int = 100_000,
) -> SpectralReport:
    """Classify the parameter regime as below / on / above the threshold.

    Without an equilibrium estimate and with all pull rates zero, the test
    is ``lambda_A1`` versus ``beta / gamma``.  With ``i_star`` supplied the
    composite matrix ``H + gamma (1 - alpha) A`` is compared against 1; the
    two tests agree when ``alpha = 0`` and ``i_star = 0``.  ``tol`` is the
    relative width of the on-boundary band.

    Raises
    ------
    ValueError
        If any ``alpha_v > 0`` (or rates are heterogeneous) and no
        ``i_star`` was supplied: solve the equilibrium first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam_a1, _ = spectral_radius(g, None, 1.0, tol=power_tol, max_iter=max_iter)

    if i_star is None:
        if not params.all_alpha_zero:
            raise ValueError(
                "alpha > 0 requires an equilibrium estimate: solve the "
                "equilibrium first and pass i_star"
            )
        beta = _homogeneous_scalar(params.beta, "beta")
        gamma = _homogeneous_scalar(params.gamma, "gamma")
        regime = _compare(lam_a1, beta / gamma, tol)
        return SpectralReport(lam_a1, None, regime, tol)

    x = _check_state(i_star, g.n)
    b = _bind(g, params)
    h = build_H(params, g, x).h
    lengths = np.diff(g.indptr)
    data = np.repeat(b.one_minus_alpha, lengths) * b.gamma_e
    lam_c, _ = _perron(g.n, g.indptr, g.indices, data, h, power_tol, max_iter)
    regime = _compare(lam_c, 1.0, tol)
    return SpectralReport(lam_a1, lam_c, regime, tol)
