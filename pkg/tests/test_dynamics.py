import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupsync import (ConfigurationError, FrequencyProfile, PhaseTrajectory,
                       TrialConfig, complete, custom, integrate_signal,
                       integrate_signals, integrate_trial, kuramoto_rhs, path,
                       ring, sample_frequencies, synth_positions,
                       trajectory_to_csv)


def constant_profile(omegas):
    return FrequencyProfile(np.asarray(omegas, float), np.zeros(len(omegas)))


class TestTrialConfig:
    def test_defaults(self):
        cfg = TrialConfig(c=1.25)
        assert cfg.T == 30.0 and cfg.dt == 0.01
        assert cfg.n_steps == 3000
        assert np.allclose(cfg.theta0_vector(7), np.pi / 2)

    def test_theta0_vector_passthrough(self):
        cfg = TrialConfig(c=1.0, theta0=np.array([0.1, 0.2, 0.3]))
        assert np.array_equal(cfg.theta0_vector(3), [0.1, 0.2, 0.3])
        with pytest.raises(ConfigurationError):
            cfg.theta0_vector(4)

    @pytest.mark.parametrize("kwargs", [
        dict(c=1.0, T=-1.0),
        dict(c=1.0, dt=0.0),
        dict(c=1.0, dt=31.0),
        dict(c=-0.1),
        dict(c=1.0, tau_omega=0.0),
        dict(c=1.0, T=30.0, dt=0.007),   # T/dt is not an integer
        dict(c=1.0, omega_mode="bogus"),
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ConfigurationError):
            TrialConfig(**kwargs)


class TestPhaseTrajectory:
    def test_time_grid_excludes_origin(self):
        traj = PhaseTrajectory(np.zeros((2, 5)), dt=0.5)
        assert np.allclose(traj.t, [0.5, 1.0, 1.5, 2.0, 2.5])
        assert traj.T == 2.5 and traj.n == 2 and traj.n_steps == 5

    def test_rejects_nonfinite(self):
        bad = np.zeros((2, 5))
        bad[1, 3] = np.nan
        with pytest.raises(ConfigurationError):
            PhaseTrajectory(bad, dt=0.01)

    def test_rejects_aliased_step(self):
        bad = np.zeros((1, 4))
        bad[0, 2] = 3.5  # > pi jump between consecutive samples
        with pytest.raises(ConfigurationError):
            PhaseTrajectory(bad, dt=0.01)


class TestRhs:
    def test_zero_coupling_returns_omega(self):
        A = complete(4)
        theta = np.array([0.3, 1.1, -0.4, 2.0])
        omega = np.array([3.0, 4.0, 5.0, 6.0])
        assert np.array_equal(kuramoto_rhs(theta, omega, 0.0, A), omega)

    def test_synchronised_manifold_returns_omega(self):
        A = ring(5)
        theta = np.full(5, 1.234)
        omega = np.array([3.0, 3.5, 4.0, 4.5, 5.0])
        assert np.allclose(kuramoto_rhs(theta, omega, 7.0, A), omega, atol=1e-15)

    def test_two_node_hand_value(self):
        A = complete(2)
        v = kuramoto_rhs([0.0, np.pi / 2], [0.0, 0.0], 2.0, A)
        assert np.allclose(v, [1.0, -1.0], atol=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(ConfigurationError):
            kuramoto_rhs([0.0, 1.0], [1.0, 2.0, 3.0], 1.0, complete(3))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(3, 6), st.floats(-3.0, 3.0), st.data())
    def test_phase_shift_invariance(self, n, alpha, data):
        # the coupling depends on phase differences only
        theta = np.array(data.draw(st.lists(
            st.floats(-3.0, 3.0), min_size=n, max_size=n)))
        omega = np.linspace(2.0, 5.0, n)
        A = ring(n)
        assert np.allclose(kuramoto_rhs(theta + alpha, omega, 2.0, A),
                           kuramoto_rhs(theta, omega, 2.0, A), atol=1e-12)


class TestIntegration:
    def test_single_node_is_pure_drift(self):
        prof = constant_profile([3.7])
        cfg = TrialConfig(c=5.0, T=10.0, seed=3)
        traj = integrate_trial(cfg, complete(1), prof)
        assert np.allclose(traj.theta[0], np.pi / 2 + 3.7 * traj.t, atol=1e-9)

    def test_two_node_locking_offset(self):
        # phase difference obeys d(delta)/dt = -1 - 1.5 sin(delta)
        prof = constant_profile([3.0, 4.0])
        traj = integrate_trial(TrialConfig(c=1.5, seed=0), complete(2), prof)
        delta = traj.theta[0] - traj.theta[1]
        assert delta[-1] == pytest.approx(np.arcsin(-1.0 / 1.5), abs=1e-6)
        # locked: the difference stops moving
        assert abs(delta[-1] - delta[-200]) < 1e-9

    def test_two_node_below_threshold_drifts(self):
        prof = constant_profile([3.0, 4.0])
        traj = integrate_trial(TrialConfig(c=0.5, seed=0), complete(2), prof)
        delta = traj.theta[0] - traj.theta[1]
        drift = (delta[-1] - delta[0]) / (traj.t[-1] - traj.t[0])
        assert abs(drift) > 0.5

    def test_synchronised_manifold_any_topology(self):
        prof = constant_profile(np.full(5, 3.3))
        for A in (complete(5), ring(5), path(5)):
            traj = integrate_trial(TrialConfig(c=9.0, T=5.0, seed=1), A, prof)
            assert np.all(traj.theta == traj.theta[0])

    def test_deterministic_in_seed(self, group1):
        cfg = TrialConfig(c=1.25, T=5.0, seed=(11, 2))
        a = integrate_trial(cfg, ring(7), group1)
        b = integrate_trial(cfg, ring(7), group1)
        assert np.array_equal(a.theta, b.theta)
        c = integrate_trial(TrialConfig(c=1.25, T=5.0, seed=(11, 3)), ring(7), group1)
        assert not np.array_equal(a.theta, c.theta)

    def test_rotation_shifts_trajectory(self, group1):
        sig = sample_frequencies(group1, 10.0, 0.5, rng_seed=4)
        alpha = 0.8
        base = TrialConfig(c=1.25, T=10.0, seed=0)
        shifted = TrialConfig(c=1.25, T=10.0, theta0=np.pi / 2 + alpha, seed=0)
        a = integrate_signal(base, ring(7), sig)
        b = integrate_signal(shifted, ring(7), sig)
        assert np.allclose(b.theta, a.theta + alpha, atol=1e-9)

    def test_permutation_equivariance(self, group1):
        sig = sample_frequencies(group1, 5.0, 0.5, rng_seed=7)
        perm = np.array([3, 0, 6, 2, 5, 1, 4])
        A = path(7)
        cfg = TrialConfig(c=2.0, T=5.0, theta0=np.linspace(0.0, 1.2, 7), seed=0)
        base = integrate_signal(cfg, A, sig)

        from groupsync import FrequencySignal
        sig_p = FrequencySignal(sig.values[:, perm], tau=sig.tau, T=sig.T)
        A_p = custom(A.a[np.ix_(perm, perm)])
        cfg_p = TrialConfig(c=2.0, T=5.0, theta0=cfg.theta0_vector(7)[perm], seed=0)
        permuted = integrate_signal(cfg_p, A_p, sig_p)
        assert np.allclose(permuted.theta, base.theta[perm], atol=1e-10)

    def test_halving_dt_convergence(self, group1):
        # same frozen frequency signal, dt and dt/2; shared time points
        # agree to well under 1e-5 rad over the full 30 s
        sig = sample_frequencies(group1, 30.0, 0.5, rng_seed=12)
        A = complete(7)
        coarse = integrate_signal(TrialConfig(c=1.25, seed=0), A, sig)
        fine = integrate_signal(TrialConfig(c=1.25, dt=0.005, seed=0), A, sig)
        diff = np.abs(fine.theta[:, 1::2] - coarse.theta).max()
        assert diff < 1e-5

    def test_batch_matches_sequential_bitwise(self, group2):
        cfg = TrialConfig(c=4.4, T=5.0, seed=0)
        signals = [sample_frequencies(group2, 5.0, 0.01, (9, j)) for j in range(4)]
        batch = integrate_signals(cfg, ring(7), signals)
        for sig, traj in zip(signals, batch):
            solo = integrate_signal(cfg, ring(7), sig)
            assert np.array_equal(traj.theta, solo.theta)

    def test_batch_rejects_mixed_grids(self, group2):
        cfg = TrialConfig(c=4.4, T=5.0, seed=0)
        signals = [sample_frequencies(group2, 5.0, 0.01, (9, 0)),
                   sample_frequencies(group2, 5.0, 0.5, (9, 1))]
        with pytest.raises(ConfigurationError):
            integrate_signals(cfg, ring(7), signals)

    def test_profile_size_must_match_topology(self, group1):
        with pytest.raises(ConfigurationError):
            integrate_trial(TrialConfig(c=1.0), complete(5), group1)

    def test_constant_mode_holds_one_draw(self, group1):
        cfg = TrialConfig(c=0.0, T=5.0, seed=6, omega_mode="constant")
        traj = integrate_trial(cfg, complete(7), group1)
        # uncoupled + constant omega: each phase is a straight line
        slopes = np.diff(traj.theta, axis=1) / cfg.dt
        assert np.allclose(slopes, slopes[:, :1], atol=1e-9)


class TestPositions:
    def test_positions_are_scaled_sines(self):
        traj = PhaseTrajectory(np.array([[0.1, 0.2], [0.3, 0.4]]), dt=0.01)
        x = synth_positions(traj, np.array([2.0, 3.0]))
        assert np.allclose(x, [[2 * np.sin(0.1), 2 * np.sin(0.2)],
                               [3 * np.sin(0.3), 3 * np.sin(0.4)]])

    def test_constant_phase_gives_constant_series(self):
        traj = PhaseTrajectory(np.full((3, 50), np.pi / 2), dt=0.01)
        x = synth_positions(traj, 1.5)
        assert np.allclose(x, 1.5)

    def test_rejects_nonpositive_amplitude(self):
        traj = PhaseTrajectory(np.zeros((2, 4)), dt=0.01)
        with pytest.raises(ConfigurationError):
            synth_positions(traj, np.array([1.0, 0.0]))
        with pytest.raises(ConfigurationError):
            synth_positions(traj, np.array([1.0, 2.0, 3.0]))


def test_csv_export_round_trips():
    theta = np.cumsum(np.full((2, 6), 0.04), axis=1)
    traj = PhaseTrajectory(theta, dt=0.01)
    text = trajectory_to_csv(traj)
    lines = text.strip().split("\n")
    assert lines[0] == "t,theta_1,theta_2"
    assert len(lines) == 7
    grid = np.loadtxt(text.splitlines()[1:], delimiter=",")
    assert np.allclose(grid[:, 0], traj.t)
    assert np.allclose(grid[:, 1:].T, theta, atol=1e-9)
