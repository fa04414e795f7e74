import numpy as np
import pytest

from defensedyn import (
    AttackGraph,
    ConvergenceKind,
    ModelParams,
    Trajectory,
    classify_convergence,
    integrate,
    solve_equilibrium,
    speed_indicator,
    stability_margin,
)


def synthetic_trajectory(times, states):
    """Trajectory wrapper for hand-built state sequences."""
    g = AttackGraph.cycle(2)
    return Trajectory(
        times=np.asarray(times, dtype=float),
        states=np.asarray(states, dtype=float),
        params=ModelParams(0.5, 0.5, 0.5),
        graph=g,
    )


class TestSpeedIndicator:
    def test_matches_discrete_closed_form_exponential(self):
        # scalar i(t) = exp(-c t): the forward quotient is exactly
        # exp(-c t) (1 - exp(-c dt)) / dt
        c, dt = 0.5, 1.0
        times = np.arange(0.0, 60.0 + dt, dt)
        states = np.exp(-c * times)[:, None] * np.ones((1, 2)) * 0.5
        series = speed_indicator(synthetic_trajectory(times, states))
        q = np.abs(np.diff(states, axis=0)).sum(axis=1) / dt
        expected = np.log(q[1:]) / times[1:-1]
        assert series.times[0] == pytest.approx(times[1])
        assert series.S == pytest.approx(expected[: len(series.S)], abs=1e-12)

    def test_long_run_limit_is_minus_c(self):
        c, dt = 0.5, 0.5
        times = np.arange(0.0, 100.0 + dt, dt)
        states = np.exp(-c * times)[:, None]
        series = speed_indicator(synthetic_trajectory(times, np.repeat(states, 2, axis=1)))
        # S(t) -> -c + log(c~)/t; at t = 100 within 0.01 of -c... the series
        # truncates near t ~ 65 where differences underflow, so use its tail
        assert series.S[-1] == pytest.approx(-c, abs=0.02)

    def test_polynomial_closed_form(self):
        # scalar i(t) = 1/(1+t): quotient is 1 / ((1+t)(1+t+dt))
        dt = 1.0
        times = np.arange(0.0, 200.0 + dt, dt)
        states = (1.0 / (1.0 + times))[:, None]
        series = speed_indicator(synthetic_trajectory(times, np.repeat(states, 2, axis=1)))
        expected = np.log(2.0 / ((1 + series.times) * (2 + series.times))) / series.times
        assert series.S == pytest.approx(expected, abs=1e-12)
        # tends to zero from below
        assert series.S[-1] < 0
        assert abs(series.S[-1]) < abs(series.S[len(series.S) // 2])

    def test_already_at_equilibrium_truncates_to_empty(self):
        times = np.arange(0.0, 5.0, 0.5)
        states = np.full((len(times), 3), 0.25)
        traj = Trajectory(
            times=times, states=states, params=ModelParams(0.5, 0.5, 0.5),
            graph=AttackGraph.cycle(3),
        )
        assert len(speed_indicator(traj)) == 0

    def test_non_uniform_spacing_rejected(self):
        traj = synthetic_trajectory([0.0, 1.0, 3.0], np.full((3, 2), 0.5))
        with pytest.raises(ValueError, match="uniform"):
            speed_indicator(traj)

    def test_too_few_samples(self):
        traj = synthetic_trajectory([0.0], np.full((1, 2), 0.5))
        with pytest.raises(ValueError):
            speed_indicator(traj)


class TestClassifyConvergence:
    def test_synthetic_exponential_rate_recovered(self):
        c, dt = 0.5, 1.0
        times = np.arange(0.0, 60.0 + dt, dt)
        states = np.exp(-c * times)[:, None] * np.ones((1, 2))
        series = speed_indicator(synthetic_trajectory(times, states))
        verdict = classify_convergence(series)
        assert verdict.kind is ConvergenceKind.EXPONENTIAL
        assert verdict.rate == pytest.approx(-0.5, rel=0.02)

    def test_synthetic_polynomial(self):
        dt = 1.0
        times = np.arange(0.0, 400.0 + dt, dt)
        states = (1.0 / (1.0 + times))[:, None]
        series = speed_indicator(synthetic_trajectory(times, np.repeat(states, 2, axis=1)))
        verdict = classify_convergence(series)
        assert verdict.kind is ConvergenceKind.POLYNOMIAL
        assert verdict.rate is None

    def test_boundary_system_polynomial(self):
        # two-node edge with matched rates sits exactly on the threshold
        g = AttackGraph.cycle(2)
        p = ModelParams(0.0, 0.5, 0.5)
        traj = integrate(g, p, np.full(2, 0.8), t_end=220.0, step=0.05, stride=20)
        verdict = classify_convergence(speed_indicator(traj))
        assert verdict.kind is ConvergenceKind.POLYNOMIAL

    def test_subthreshold_system_exponential(self):
        g = AttackGraph.cycle(2)
        p = ModelParams(0.0, 0.6, 0.3)  # beta/gamma = 2 > 1
        traj = integrate(g, p, np.full(2, 0.8), t_end=100.0, step=0.05, stride=10)
        verdict = classify_convergence(speed_indicator(traj))
        assert verdict.kind is ConvergenceKind.EXPONENTIAL
        assert verdict.rate < 0  # required whenever the verdict is exponential

    def test_rate_matches_margin_within_20_percent(self):
        g = AttackGraph.cycle(2)
        p = ModelParams(0.0, 0.4, 0.5)
        res = solve_equilibrium(g, p)
        margin = stability_margin(g, p, res.i_star)
        traj = integrate(g, p, np.full(2, 0.8), t_end=400.0, step=0.05, stride=20)
        verdict = classify_convergence(speed_indicator(traj))
        assert verdict.kind is ConvergenceKind.EXPONENTIAL
        assert abs(verdict.rate - margin) <= 0.2 * abs(margin)

    def test_window_and_evidence(self):
        c, dt = 0.3, 1.0
        times = np.arange(0.0, 80.0 + dt, dt)
        states = np.exp(-c * times)[:, None]
        series = speed_indicator(synthetic_trajectory(times, np.repeat(states, 2, axis=1)))
        verdict = classify_convergence(series, tail_fraction=0.5)
        t_lo, t_hi = verdict.window
        assert t_lo >= series.times[0] and t_hi == series.times[-1]
        for key in ("tail_mean", "tail_trend", "fitted_limit", "inconclusive"):
            assert key in verdict.evidence

    def test_series_too_short(self):
        series = speed_indicator(
            synthetic_trajectory([0.0, 1.0, 2.0], np.linspace(0.9, 0.7, 6).reshape(3, 2))
        )
        with pytest.raises(ValueError, match="too short"):
            classify_convergence(series)

    def test_parameter_validation(self):
        c, dt = 0.3, 1.0
        times = np.arange(0.0, 30.0 + dt, dt)
        states = np.exp(-c * times)[:, None] * np.ones((1, 2))
        series = speed_indicator(synthetic_trajectory(times, states))
        with pytest.raises(ValueError):
            classify_convergence(series, tail_fraction=0.0)


class TestStabilityMargin:
    def test_decoupled_all_ones_params(self):
        g = AttackGraph.cycle(6)
        p = ModelParams(1.0, 1.0, 1.0)
        assert stability_margin(g, p, np.full(6, 0.5)) == pytest.approx(-2.0, abs=1e-9)

    def test_boundary_margin_zero(self):
        g = AttackGraph.cycle(2)
        p = ModelParams(0.0, 0.5, 0.5)
        assert stability_margin(g, p, np.zeros(2)) == pytest.approx(0.0, abs=1e-9)

    def test_subthreshold_margin_formula(self):
        # at the origin the Jacobian is -beta I + gamma A, so the margin is
        # -beta + gamma * lambda_A1
        g = AttackGraph.cycle(10)  # lambda = 2
        p = ModelParams(0.0, 0.5, 0.2)
        assert stability_margin(g, p, np.zeros(10)) == pytest.approx(-0.5 + 0.2 * 2, abs=1e-9)
