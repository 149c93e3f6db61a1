import numpy as np
import pytest

from lowrankmc import (
    DimensionError,
    InitStrategy,
    NumericalError,
    ParameterError,
    SolverConfig,
    gen_mcar,
    hard_impute,
    objective_value,
    sample_gaussian_model,
    select_lambda,
    soft_impute,
    soft_threshold_spectrum,
    stationarity_residual,
    thin_svd,
)


def random_instance(seed, m=20, n=15, q=3, sigma=0.1, p=0.3):
    rng = np.random.default_rng(seed)
    gt = sample_gaussian_model(m, n, q, 1.0, sigma, rng)
    mask = gen_mcar(m, n, p, rng)
    return gt, mask


class TestSoftImpute:
    def test_closed_form_on_full_observation(self):
        rng = np.random.default_rng(0)
        Y = rng.standard_normal((12, 10))
        mask = np.ones((12, 10), bool)
        f = thin_svd(Y)
        for lam in (0.1, 0.5, 1.5):
            expected = (f.U * soft_threshold_spectrum(f.theta, lam)) @ f.V.T
            res = soft_impute(Y, mask, lam)
            err = np.linalg.norm(res.Z_hat - expected) / max(np.linalg.norm(expected), 1e-12)
            assert err <= 1e-8

    def test_zero_lambda_full_observation_recovers_y(self):
        rng = np.random.default_rng(1)
        Y = rng.standard_normal((8, 8))
        res = soft_impute(Y, np.ones((8, 8), bool), 0.0)
        assert np.linalg.norm(res.Z_hat - Y) / np.linalg.norm(Y) <= 1e-10

    def test_large_lambda_zero_fixed_point_in_one_iteration(self):
        gt, mask = random_instance(2)
        smax = np.linalg.norm(np.where(mask, gt.Y, 0.0), 2)
        res = soft_impute(gt.Y, mask, smax * 1.01)
        assert res.n_iters == 1
        np.testing.assert_array_equal(res.Z_hat, np.zeros_like(gt.Y))

    def test_monotone_objective_trace(self):
        for seed in range(10):
            gt, mask = random_instance(seed)
            res = soft_impute(gt.Y, mask, 0.5)
            assert np.all(np.diff(res.objective_trace) <= 1e-10)

    def test_fixed_point_residual(self):
        cfg = SolverConfig(tol=1e-7, max_iters=2000)
        gt, mask = random_instance(3)
        res = soft_impute(gt.Y, mask, 0.8, cfg)
        assert res.converged
        from lowrankmc.solvers import _soft_step
        Z_next, _ = _soft_step(np.where(mask, gt.Y, 0.0), mask, res.Z_hat, 0.8)
        assert np.linalg.norm(res.Z_hat - Z_next) <= 10 * cfg.tol * np.linalg.norm(res.Z_hat)

    def test_stationarity_residual_small_at_convergence(self):
        cfg = SolverConfig(tol=1e-8, max_iters=5000)
        for seed in range(5):
            gt, mask = random_instance(100 + seed, m=20, n=20)
            res = soft_impute(gt.Y, mask, 1.0, cfg)
            assert stationarity_residual(gt.Y, mask, res.Z_hat, 1.0) <= 1e-4

    def test_rank_nonincreasing_in_lambda(self):
        gt, mask = random_instance(4, m=25, n=25, q=5)
        smax = np.linalg.norm(np.where(mask, gt.Y, 0.0), 2)
        ranks = [soft_impute(gt.Y, mask, lam).factors.rank
                 for lam in np.geomspace(1e-3 * smax, smax, 5)]
        assert ranks == sorted(ranks, reverse=True)

    def test_missing_sentinels_never_read(self):
        gt, mask = random_instance(5)
        Y_nan = gt.Y.copy()
        Y_nan[~mask] = np.nan
        a = soft_impute(gt.Y, mask, 0.5)
        b = soft_impute(Y_nan, mask, 0.5)
        np.testing.assert_array_equal(a.Z_hat, b.Z_hat)

    def test_errors(self):
        Y = np.ones((3, 3))
        with pytest.raises(ParameterError):
            soft_impute(Y, np.zeros((3, 3), bool), 1.0)
        with pytest.raises(ParameterError):
            soft_impute(Y, np.ones((3, 3), bool), -1.0)
        bad = Y.copy()
        bad[0, 0] = np.inf
        with pytest.raises(NumericalError):
            soft_impute(bad, np.ones((3, 3), bool), 1.0)


class TestHardImpute:
    def test_full_observation_equals_truncated_svd(self):
        rng = np.random.default_rng(6)
        Y = rng.standard_normal((10, 8))
        mask = np.ones((10, 8), bool)
        for q in (1, 3, 5):
            res = hard_impute(Y, mask, q)
            expected = thin_svd(Y, q).reconstruct()
            assert np.linalg.norm(res.Z_hat - expected) <= 1e-8 * np.linalg.norm(expected)

    def test_full_rank_full_observation_recovers_y(self):
        rng = np.random.default_rng(7)
        Y = rng.standard_normal((6, 9))
        res = hard_impute(Y, np.ones((6, 9), bool), 6)
        assert np.linalg.norm(res.Z_hat - Y) <= 1e-8 * np.linalg.norm(Y)

    def test_rank2_recovery_with_deleted_entries(self):
        rng = np.random.default_rng(8)
        Z = np.outer(rng.standard_normal(6), rng.standard_normal(6)) \
            + np.outer(rng.standard_normal(6), rng.standard_normal(6))
        mask = np.ones((6, 6), bool)
        mask[0, 3] = mask[2, 5] = mask[4, 1] = False
        res = hard_impute(Z, mask, 2, SolverConfig(tol=1e-10, max_iters=5000))
        assert np.linalg.norm(res.Z_hat - Z) / np.linalg.norm(Z) <= 1e-6

    def test_monotone_objective_trace(self):
        for seed in range(10):
            gt, mask = random_instance(seed + 50)
            res = hard_impute(gt.Y, mask, 3)
            assert np.all(np.diff(res.objective_trace) <= 1e-10)

    def test_colmean_init_supported(self):
        gt, mask = random_instance(9, p=0.6)
        res = hard_impute(gt.Y, mask, 3, SolverConfig(init=InitStrategy.COLMEAN_FILL))
        assert res.factors.rank == 3

    def test_dof_warning(self):
        gt, mask = random_instance(10, m=8, n=8, q=2, p=0.0)
        sparse = np.zeros((8, 8), bool)
        sparse[:2, :] = True  # 16 observed < 2*(8+8-2) = 28
        with pytest.warns(UserWarning, match="degrees of freedom"):
            hard_impute(gt.Y, sparse, 2)

    def test_rank_bounds(self):
        Y = np.ones((4, 4))
        mask = np.ones((4, 4), bool)
        with pytest.raises(ParameterError):
            hard_impute(Y, mask, 0)
        with pytest.raises(ParameterError):
            hard_impute(Y, mask, 5)


class TestObjectiveValue:
    def test_perfect_fit_zero(self):
        Y = np.arange(6, dtype=float).reshape(2, 3)
        mask = np.ones((2, 3), bool)
        assert objective_value(Y, mask, Y, 0.0) == 0.0

    def test_zero_estimate(self):
        Y = np.array([[1.0, 2.0], [3.0, 4.0]])
        mask = np.array([[True, False], [True, True]])
        expected = 1.0 + 9.0 + 16.0
        assert objective_value(Y, mask, np.zeros((2, 2)), 0.0) == pytest.approx(expected)

    def test_hand_case_with_penalty(self):
        # diagonal observed, Z = I, lambda = 1: 0 + 1*(1+1) = 2
        Y = np.array([[1.0, 99.0], [99.0, 1.0]])
        mask = np.eye(2, dtype=bool)
        assert objective_value(Y, mask, np.eye(2), 1.0) == pytest.approx(2.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            objective_value(np.zeros((2, 2)), np.ones((2, 2), bool),
                            np.zeros((3, 2)), 0.0)


class TestSelectLambda:
    def test_single_grid_value(self):
        gt, mask = random_instance(11)
        smax = np.linalg.norm(np.where(mask, gt.Y, 0.0), 2)
        lam, path = select_lambda(gt.Y, mask, grid_size=1,
                                  rng=np.random.default_rng(0))
        assert path.lambdas.shape == (1,)
        assert lam == pytest.approx(path.lambdas[0])
        assert lam <= smax  # holdout removal can only shrink the top singular value

    def test_determinism(self):
        gt, mask = random_instance(12)
        a, _ = select_lambda(gt.Y, mask, rng=np.random.default_rng(3))
        b, _ = select_lambda(gt.Y, mask, rng=np.random.default_rng(3))
        assert a == b

    def test_noiseless_low_rank_prefers_small_lambda(self):
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(200 + seed)
            gt = sample_gaussian_model(20, 20, 2, 1.0, 0.0, rng)
            mask = gen_mcar(20, 20, 0.1, rng)
            lam, path = select_lambda(gt.Y, mask, rng=rng)
            if path.best_index >= len(path.lambdas) // 2:
                hits += 1
        assert hits >= 15

    def test_invalid_holdout(self):
        gt, mask = random_instance(13)
        with pytest.raises(ParameterError):
            select_lambda(gt.Y, mask, holdout_frac=0.8, rng=np.random.default_rng(0))
