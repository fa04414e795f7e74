"""Simulation and analysis of preventive/reactive defense dynamics on attack graphs.

The library integrates the nonlinear compromise-probability system on
arbitrary directed or undirected graphs, simulates the underlying per-node
Markov chain, classifies the spectral parameter regime, computes the unique
equilibrium with trajectory bounds, and measures convergence speed.
"""
from .bounds import (
    BoundMode,
    BoundsEnvelope,
    EpsilonBox,
    compute_PQ,
    envelope_at,
    envelope_curves,
    lemma2_epsilon,
    make_envelope,
    trajectory_extrema,
)
from .convergence import (
    ConvergenceKind,
    SpeedSeries,
    SpeedVerdict,
    classify_convergence,
    speed_indicator,
    stability_margin,
)
from .dynamics import (
    IntegrationError,
    ModelParams,
    Trajectory,
    integrate,
    jacobian,
    rhs,
    theta_infection,
)
from .equilibrium import (
    EquilibriumError,
    EquilibriumResult,
    StabilityReport,
    equilibrium_residual,
    solve_equilibrium,
    verify_global_stability,
)
from .graph import (
    AttackGraph,
    EdgeListFormatError,
    FrobeniusDecomposition,
    frobenius_decompose,
    load_edge_list,
    write_edge_list,
)
from .spectral import (
    HMatrix,
    PowerIterationError,
    Regime,
    SpectralReport,
    build_H,
    classify_regime,
    spectral_radius,
)
from .stochastic import (
    EnsembleReport,
    StochasticRun,
    agreement_stats,
    run_ensemble,
    simulate_markov,
)

__version__ = "0.1.0"

__all__ = [
    "AttackGraph",
    "BoundMode",
    "BoundsEnvelope",
    "ConvergenceKind",
    "EdgeListFormatError",
    "EnsembleReport",
    "EpsilonBox",
    "EquilibriumError",
    "EquilibriumResult",
    "FrobeniusDecomposition",
    "HMatrix",
    "IntegrationError",
    "ModelParams",
    "PowerIterationError",
    "Regime",
    "SpectralReport",
    "SpeedSeries",
    "SpeedVerdict",
    "StabilityReport",
    "StochasticRun",
    "Trajectory",
    "agreement_stats",
    "build_H",
    "classify_convergence",
    "classify_regime",
    "compute_PQ",
    "envelope_at",
    "envelope_curves",
    "equilibrium_residual",
    "frobenius_decompose",
    "integrate",
    "jacobian",
    "lemma2_epsilon",
    "load_edge_list",
    "make_envelope",
    "rhs",
    "run_ensemble",
    "simulate_markov",
    "solve_equilibrium",
    "spectral_radius",
    "speed_indicator",
    "stability_margin",
    "theta_infection",
    "trajectory_extrema",
    "verify_global_stability",
    "write_edge_list",
    "__version__",
]
