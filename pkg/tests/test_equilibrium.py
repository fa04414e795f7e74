import numpy as np
import pytest

from defensedyn import (
    AttackGraph,
    EquilibriumError,
    ModelParams,
    Regime,
    equilibrium_residual,
    solve_equilibrium,
    stability_margin,
    verify_global_stability,
)


class TestSolveEquilibrium:
    def test_all_ones_params_give_half(self):
        g = AttackGraph.cycle(10)
        res = solve_equilibrium(g, ModelParams(1.0, 1.0, 1.0))
        assert res.i_star == pytest.approx(np.full(10, 0.5), abs=1e-12)
        assert res.residual <= 1e-11

    def test_below_threshold_returns_origin_exactly(self):
        g = AttackGraph.cycle(2)  # lambda = 1, beta/gamma = 2
        res = solve_equilibrium(g, ModelParams(0.0, 0.6, 0.3))
        assert np.all(res.i_star == 0.0)
        assert res.regime is Regime.BELOW_THRESHOLD
        assert res.iterations == 0
        assert res.residual == 0.0

    def test_on_boundary_returns_origin(self):
        g = AttackGraph.cycle(10)  # lambda = 2
        res = solve_equilibrium(g, ModelParams(0.0, 0.5, 0.25))
        assert np.all(res.i_star == 0.0)
        assert res.regime is Regime.ON_BOUNDARY

    def test_isolated_node_scalar_fixed_point(self):
        g = AttackGraph.from_edges([(0, 1)], n=2, directed=True)
        p = ModelParams(np.array([0.2, 0.0]), 0.8, 0.5)
        res = solve_equilibrium(g, p)
        # alpha / (alpha + beta) for the isolated source node
        assert res.i_star[0] == pytest.approx(0.2, abs=1e-12)

    def test_above_threshold_interior(self):
        g = AttackGraph.cycle(10)
        res = solve_equilibrium(g, ModelParams(0.0, 0.3, 0.2))
        assert res.regime is Regime.ABOVE_THRESHOLD
        assert np.all(res.i_star > 0.0) and np.all(res.i_star < 1.0)
        # symmetric system: the interior root of the scalar balance
        x = np.roots([0.04, -0.44, 0.1]).min()
        assert res.i_star == pytest.approx(np.full(10, x), abs=1e-9)

    def test_interior_when_pull_present(self):
        g = AttackGraph.erdos_renyi(25, 0.15, seed=3, directed=True)
        res = solve_equilibrium(g, ModelParams(0.3, 0.7, 0.4))
        assert np.all(res.i_star > 0.0) and np.all(res.i_star < 1.0)

    def test_residual_consistency(self):
        cases = [
            (AttackGraph.cycle(10), ModelParams(0.0, 0.3, 0.2)),
            (AttackGraph.erdos_renyi(20, 0.2, seed=8), ModelParams(0.25, 0.6, 0.5)),
            (AttackGraph.complete(6), ModelParams(0.1, 0.9, 0.2)),
        ]
        tol = 1e-12
        for g, p in cases:
            res = solve_equilibrium(g, p, tol=tol)
            assert res.residual <= 10 * tol
            assert equilibrium_residual(g, p, res.i_star) == pytest.approx(res.residual)

    def test_two_sided_bracketing(self):
        g = AttackGraph.erdos_renyi(15, 0.25, seed=17, directed=True)
        p = ModelParams(0.2, 0.7, 0.5)
        upper = solve_equilibrium(g, p, tol=1e-13)
        lower = solve_equilibrium(g, p, tol=1e-13, start="lower")
        assert np.max(np.abs(upper.i_star - lower.i_star)) <= 2e-13

    def test_lower_start_requires_positive_alpha(self):
        g = AttackGraph.cycle(4)
        with pytest.raises(ValueError, match="lower"):
            solve_equilibrium(g, ModelParams(0.0, 0.3, 0.5), start="lower")

    def test_max_iter_exhaustion_carries_state(self):
        g = AttackGraph.cycle(10)
        with pytest.raises(EquilibriumError) as exc:
            solve_equilibrium(g, ModelParams(0.3, 0.7, 0.4), tol=1e-15, max_iter=3)
        assert exc.value.iterations == 3
        assert exc.value.last_iterate.shape == (10,)
        assert exc.value.change > 0

    def test_margin_optional(self):
        g = AttackGraph.cycle(6)
        res = solve_equilibrium(g, ModelParams(1.0, 1.0, 1.0), with_margin=True)
        assert res.stability_margin == pytest.approx(-2.0, abs=1e-9)
        res2 = solve_equilibrium(g, ModelParams(1.0, 1.0, 1.0))
        assert res2.stability_margin is None

    def test_margin_nonpositive_at_equilibrium(self):
        cases = [
            (AttackGraph.cycle(10), ModelParams(0.0, 0.3, 0.2)),
            (AttackGraph.erdos_renyi(20, 0.2, seed=8), ModelParams(0.25, 0.6, 0.5)),
        ]
        for g, p in cases:
            res = solve_equilibrium(g, p)
            assert stability_margin(g, p, res.i_star) <= 1e-8

    def test_result_serialization(self):
        g = AttackGraph.cycle(4)
        d = solve_equilibrium(g, ModelParams(1.0, 1.0, 1.0)).to_dict()
        assert d["regime"] == "OnBoundary"
        assert d["i_star"] == pytest.approx([0.5] * 4)
        big = solve_equilibrium(
            AttackGraph.erdos_renyi(250, 0.02, seed=1), ModelParams(0.1, 0.9, 0.3)
        ).to_dict()
        assert "i_star_summary" in big and "i_star" not in big


class TestEquilibriumResidual:
    def test_zero_at_origin_without_pull(self):
        g = AttackGraph.cycle(5)
        assert equilibrium_residual(g, ModelParams(0.0, 0.5, 0.5), np.zeros(5)) == 0.0

    def test_all_ones_params_at_origin(self):
        g = AttackGraph.cycle(5)
        assert equilibrium_residual(g, ModelParams(1.0, 1.0, 1.0), np.zeros(5)) == pytest.approx(1.0)


class TestGlobalStability:
    def test_all_ones_params(self):
        g = AttackGraph.cycle(8)
        report = verify_global_stability(
            g, ModelParams(1.0, 1.0, 1.0), trials=5, t_end=20.0, tol=1e-6, seed=1
        )
        assert report.passed
        assert report.i_star == pytest.approx(np.full(8, 0.5), abs=1e-9)

    def test_below_threshold_collapses_to_origin(self):
        g = AttackGraph.cycle(2)
        report = verify_global_stability(
            g, ModelParams(0.0, 0.6, 0.3), trials=4, t_end=150.0, tol=1e-6, seed=2
        )
        assert report.passed
        assert np.all(report.i_star == 0.0)

    def test_interior_attractor_with_pull(self):
        g = AttackGraph.erdos_renyi(20, 0.15, seed=6)
        report = verify_global_stability(
            g, ModelParams(0.3, 0.7, 0.4), trials=6, t_end=120.0, tol=1e-6, seed=3, step=0.1
        )
        assert report.passed

    def test_trials_validation(self):
        g = AttackGraph.cycle(3)
        with pytest.raises(ValueError):
            verify_global_stability(g, ModelParams(0.5, 0.5, 0.5), trials=1, t_end=1.0, tol=1e-6, seed=0)
