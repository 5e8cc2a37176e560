import numpy as np
import pytest

from dyncorr.distributions import RngStream
from dyncorr.exceptions import ConfigError
from dyncorr.linalg import cholesky, frac_power
from dyncorr.model import ModelParams, simulate, step_latent


class TestModelParams:
    def test_valid(self):
        p = ModelParams(nu=5.0, d=0.8, m=2)
        assert p.nu == 5.0

    def test_nu_must_exceed_m(self):
        with pytest.raises(ConfigError):
            ModelParams(nu=2.0, d=0.5, m=2)

    def test_d_bounds(self):
        with pytest.raises(ConfigError):
            ModelParams(nu=5.0, d=1.2, m=2)
        ModelParams(nu=5.0, d=-1.0, m=2)
        ModelParams(nu=5.0, d=1.0, m=2)


class TestStepLatent:
    def test_d_zero_decouples(self, rng):
        # with d = 0 the transition ignores the previous state entirely
        params = ModelParams(nu=5.0, d=0.0, m=2)
        weird_prev = np.array([[40.0, 12.0], [12.0, 9.0]])
        acc = np.zeros((2, 2))
        n = 30_000
        for _ in range(n):
            acc += step_latent(rng, weird_prev, params)
        np.testing.assert_allclose(acc / n, np.eye(2), atol=0.05)

    def test_identity_start_mean(self, rng):
        params = ModelParams(nu=5.0, d=0.8, m=2)
        acc = np.zeros((2, 2))
        n = 30_000
        for _ in range(n):
            acc += step_latent(rng, np.eye(2), params)
        np.testing.assert_allclose(acc / n, np.eye(2), atol=0.05)

    def test_conditional_mean(self, rng):
        # E[Q_k^-1 | Q_{k-1}^-1] = (Q_{k-1}^-1)^d at d = 0.8, nu = 5
        params = ModelParams(nu=5.0, d=0.8, m=2)
        prev_inv = np.array([[2.0, 0.6], [0.6, 1.2]])
        expected = frac_power(prev_inv, 0.8)
        acc = np.zeros((2, 2))
        n = 100_000
        for _ in range(n):
            acc += step_latent(rng, prev_inv, params)
        np.testing.assert_allclose(acc / n, expected, atol=0.02)


class TestSimulate:
    def test_benchmark_shape_and_invariants(self, rng):
        traj = simulate(rng, ModelParams(nu=5.0, d=0.8, m=2), 150)
        assert traj.K == 150 and traj.m == 2
        assert traj.q_inv_seq.shape == (150, 2, 2)
        assert traj.omega_seq.shape == (150, 2, 2)
        assert np.all(np.isfinite(traj.y_seq))
        for k in range(150):
            cholesky(traj.q_inv_seq[k])  # SPD or raises
            omega = traj.omega_seq[k]
            np.testing.assert_allclose(np.diag(omega), 1.0, atol=1e-12)
            assert abs(omega[0, 1]) <= 1.0

    def test_univariate_degenerate(self, rng):
        traj = simulate(rng, ModelParams(nu=2.0, d=0.5, m=1), 500)
        np.testing.assert_allclose(traj.omega_seq, 1.0, atol=1e-12)
        # y_k are standard normal
        assert abs(traj.y_seq.mean()) < 0.15
        assert abs(traj.y_seq.std() - 1.0) < 0.1

    def test_deterministic(self):
        a = simulate(RngStream(77), ModelParams(nu=5.0, d=0.8, m=2), 40)
        b = simulate(RngStream(77), ModelParams(nu=5.0, d=0.8, m=2), 40)
        np.testing.assert_array_equal(a.y_seq, b.y_seq)
        np.testing.assert_array_equal(a.q_inv_seq, b.q_inv_seq)

    def test_k_validation(self, rng):
        with pytest.raises(ConfigError):
            simulate(rng, ModelParams(nu=5.0, d=0.8, m=2), 0)

    def test_stationary_marginal_at_d_zero(self, rng):
        # with d = 0, every Q_k^-1 ~ W(nu, I/nu); pooled mean ~ identity
        params = ModelParams(nu=5.0, d=0.0, m=2)
        acc = np.zeros((2, 2))
        n_rep, K = 200, 50
        for _ in range(n_rep):
            traj = simulate(rng, params, K)
            acc += traj.q_inv_seq.sum(axis=0)
        np.testing.assert_allclose(acc / (n_rep * K), np.eye(2), atol=0.02)

    def test_persistence_raises_autocorrelation(self, rng):
        # lag-1 autocorrelation of the off-diagonal correlation is higher
        # with d = 0.8 than with d = 0
        def lag1(d):
            vals = []
            for _ in range(20):
                traj = simulate(rng, ModelParams(nu=5.0, d=d, m=2), 300)
                x = traj.omega_seq[:, 0, 1]
                vals.append(np.corrcoef(x[:-1], x[1:])[0, 1])
            return np.mean(vals)

        rho_persistent = lag1(0.8)
        rho_white = lag1(0.0)
        assert rho_persistent > 0.2
        assert rho_persistent > rho_white + 0.1

    def test_whitened_residuals(self, rng):
        # L_k^-1 y_k has identity covariance across a long simulation
        traj = simulate(rng, ModelParams(nu=5.0, d=0.8, m=2), 4000)
        resid = np.empty_like(traj.y_seq)
        for k in range(traj.K):
            L = cholesky(traj.omega_seq[k])
            resid[k] = np.linalg.solve(L, traj.y_seq[k])
        pooled_var = resid.var(axis=0)
        np.testing.assert_allclose(pooled_var, 1.0, atol=0.08)
