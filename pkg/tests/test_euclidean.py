import math

import numpy as np
import pytest
from scipy import optimize

from dpsco.errors import RefusalError
from dpsco.euclidean import (
    ObjPConfig,
    SmoothObjective,
    app_objp,
    app_objp_sc,
    inner_solve,
    phased_dp_sgd,
)
from dpsco.mechanisms import PrivacyBudget
from dpsco.problems import (
    BallCloud,
    Dataset,
    L2Ball,
    LogisticLoss,
    LogisticSphere,
    MeanPointLoss,
    empirical_risk,
)

HUGE_EPS = PrivacyBudget(1e6, 1e-5)


def _quadratic(center):
    c = np.asarray(center, dtype=float)
    return SmoothObjective(
        value=lambda w: 0.5 * float((w - c) @ (w - c)),
        grad=lambda w: w - c,
        smoothness=1.0,
        strong_convexity=1.0,
    )


class TestInnerSolve:
    def test_quadratic_recovers_center(self):
        C = L2Ball(1.0, 3)
        center = np.array([0.3, -0.2, 0.1])
        alpha = 1e-8
        w = inner_solve(_quadratic(center), C, alpha, np.zeros(3))
        # strong-convexity conversion: ||w - c|| <= sqrt(2 alpha / lam)
        assert np.linalg.norm(w - center) <= math.sqrt(2 * alpha)

    def test_ridge_logistic_matches_reference(self):
        rng = np.random.default_rng(0)
        dist = LogisticSphere(np.array([0.6, -0.4]))
        data = dist.sample(200, rng)
        loss = LogisticLoss()
        lam = 0.05

        def f(w):
            return empirical_risk(w, data, loss) + lam * float(w @ w)

        def g(w):
            return loss.grads(w, data.X, data.y).mean(axis=0) + 2 * lam * w

        ref = optimize.minimize(f, np.zeros(2), jac=g, method="BFGS", tol=1e-14).x
        assert np.linalg.norm(ref) < 1.0  # interior, so constrained == unconstrained

        obj = SmoothObjective(
            value=f, grad=g, smoothness=loss.smoothness + 2 * lam, strong_convexity=2 * lam
        )
        w = inner_solve(obj, L2Ball(1.0, 2), 1e-12, np.zeros(2))
        assert np.linalg.norm(w - ref) <= 1e-5

    def test_start_at_optimum_keeps_value(self):
        C = L2Ball(1.0, 2)
        center = np.array([0.2, 0.2])
        obj = _quadratic(center)
        w = inner_solve(obj, C, 1e-6, center)
        assert obj.value(w) <= obj.value(center) + 1e-12

    def test_bad_alpha_rejected(self):
        with pytest.raises(ValueError):
            inner_solve(_quadratic([0.0]), L2Ball(1.0, 1), 0.0, np.zeros(1))


def _mean_point_setup(n=64, d=5, seed=1, spread=0.5, mu_scale=0.4):
    rng = np.random.default_rng(seed)
    mu = mu_scale * np.ones(d) / math.sqrt(d)
    dist = BallCloud(mu, spread=spread)
    data = dist.sample(n, rng)
    loss = MeanPointLoss(domain_radius=dist.feature_radius(), constraint_radius=1.0)
    return data, loss, L2Ball(1.0, d), dist


class TestAppObjP:
    def test_zero_noise_matches_ridge_erm(self):
        # n copies of one point: ridge minimizer is x0 / (1 + 2 lam) for the
        # J(theta) = risk + lam ||theta||^2 objective used here.
        d = 4
        x0 = 0.5 * np.ones(d) / math.sqrt(d)
        data = Dataset(np.tile(x0, (32, 1)))
        loss = MeanPointLoss()
        C = L2Ball(1.0, d)
        cfg = ObjPConfig(budget=HUGE_EPS, alpha_opt=1e-10)
        w, info = app_objp(data, loss, C, cfg, np.random.default_rng(2))
        expected = x0 / (1.0 + 2.0 * info["lam"])
        assert np.linalg.norm(w - expected) <= 1e-3

    def test_matches_direct_solver_at_tiny_alpha(self):
        data, loss, C, _ = _mean_point_setup()
        cfg = ObjPConfig(budget=HUGE_EPS, alpha_opt=1e-10, noise_multiplier=0.0)
        w, info = app_objp(data, loss, C, cfg, np.random.default_rng(3))
        lam = info["lam"]
        direct = data.X.mean(axis=0) / (1.0 + 2.0 * lam)
        direct = C.project(direct)
        assert np.linalg.norm(w - direct) <= 1e-4

    def test_output_feasible(self):
        data, loss, C, _ = _mean_point_setup()
        cfg = ObjPConfig(budget=PrivacyBudget(1.0, 1e-5))
        w, _ = app_objp(data, loss, C, cfg, np.random.default_rng(4))
        assert C.gauge(w) <= 1.0 + 1e-9

    def test_deterministic(self):
        data, loss, C, _ = _mean_point_setup()
        cfg = ObjPConfig(budget=PrivacyBudget(1.0, 1e-5))
        w1, _ = app_objp(data, loss, C, cfg, np.random.default_rng(5))
        w2, _ = app_objp(data, loss, C, cfg, np.random.default_rng(5))
        np.testing.assert_array_equal(w1, w2)

    def test_smoothness_refusal(self):
        data, loss, C, _ = _mean_point_setup(n=8)
        cfg = ObjPConfig(budget=PrivacyBudget(0.1, 1e-5), lambda_reg=1e-6)
        with pytest.raises(RefusalError) as exc:
            app_objp(data, loss, C, cfg, np.random.default_rng(6))
        assert exc.value.requirement is not None  # names the minimum n

    def test_release_distance_assertion_runs(self):
        data, loss, C, _ = _mean_point_setup()
        cfg = ObjPConfig(budget=PrivacyBudget(1.0, 1e-5), check_release_distance=True)
        _, info = app_objp(data, loss, C, cfg, np.random.default_rng(7))
        assert info["release_distance"] <= info["release_bound"]


class TestAppObjPSC:
    def test_lambda_zero_branch(self):
        data, loss, C, _ = _mean_point_setup(n=512)
        cfg = ObjPConfig(budget=PrivacyBudget(1.0, 1e-5))
        _, info = app_objp_sc(data, loss, C, cfg, np.random.default_rng(8))
        # r * beta / (eps n) = 5/512 < Delta = 1, so no ridge is added
        assert info["lam"] == 0.0

    def test_zero_noise_projected_mean(self):
        data, loss, C, _ = _mean_point_setup(n=256)
        cfg = ObjPConfig(budget=HUGE_EPS, alpha_opt=1e-10)
        w, _ = app_objp_sc(data, loss, C, cfg, np.random.default_rng(9))
        assert np.linalg.norm(w - C.project(data.X.mean(axis=0))) <= 1e-4

    def test_sigma2_scales_with_diameter(self):
        data, loss, _, _ = _mean_point_setup(n=256)
        cfg = ObjPConfig(budget=PrivacyBudget(0.5, 1e-5), alpha_opt=1e-8)
        _, small = app_objp_sc(data, loss, L2Ball(1.0, 5), cfg, np.random.default_rng(10))
        _, big = app_objp_sc(data, loss, L2Ball(math.sqrt(2.0), 5), cfg, np.random.default_rng(10))
        # sigma2^2 formula carries ||C||_2^2 / Delta_C; for balls this doubles
        # when the squared diameter doubles and Delta_C follows c_min^2.
        ratio = (big["sigma2"] / small["sigma2"]) ** 2
        assert ratio == pytest.approx(2.0 * small["delta_c"] / big["delta_c"], rel=1e-12)

    def test_requires_strong_convexity(self):
        data, _, C, _ = _mean_point_setup()
        cfg = ObjPConfig(budget=PrivacyBudget(1.0, 1e-5))
        with pytest.raises(ValueError):
            app_objp_sc(data, LogisticLoss(), C, cfg, np.random.default_rng(11))


class TestPhasedSGD:
    def test_shard_sizes(self):
        rng = np.random.default_rng(12)
        data = Dataset(rng.standard_normal((100, 1)) * 0.1)
        loss = MeanPointLoss(domain_radius=1.0, constraint_radius=0.0)
        _, info = phased_dp_sgd(data, loss, HUGE_EPS, rng)
        assert info["shard_sizes"] == [50, 25, 12, 6, 3, 1, 0]

    def test_noise_ratio_geometric(self):
        # sigma_i = 4 L eta_i sqrt(log(1/delta)) / eps with eta_i = 4^-i eta
        b = PrivacyBudget(1.0, 1e-5)
        eta = 0.1
        sig = [4.0 * 1.0 * eta * 4.0**-i * math.sqrt(math.log(1e5)) / b.epsilon for i in (1, 2, 3)]
        assert sig[1] / sig[0] == pytest.approx(0.25)
        assert sig[2] / sig[1] == pytest.approx(0.25)

    def test_zero_noise_matches_reference_one_pass(self):
        # 1-D quadratic: matched-seed run with the noise turned off must
        # land within O(1/sqrt(n)) of the population minimizer.
        rng = np.random.default_rng(13)
        dist = BallCloud(np.array([0.5]), spread=0.5)
        data = dist.sample(512, rng)
        loss = MeanPointLoss(domain_radius=1.0, constraint_radius=1.0)
        w, _ = phased_dp_sgd(data, loss, HUGE_EPS, np.random.default_rng(0))
        ref, _ = phased_dp_sgd(
            data, loss, HUGE_EPS, np.random.default_rng(0), noise_multiplier=0.0
        )
        assert abs(w[0] - ref[0]) <= 1e-3
        assert abs(ref[0] - 0.5) <= 3.0 / math.sqrt(512)

    def test_eta_cap_refusal(self):
        rng = np.random.default_rng(14)
        data = Dataset(rng.standard_normal((64, 2)))
        loss = MeanPointLoss()
        with pytest.raises(RefusalError):
            phased_dp_sgd(data, loss, PrivacyBudget(1.0, 1e-5), rng, eta=100.0)

    def test_deterministic(self):
        rng = np.random.default_rng(15)
        dist = BallCloud(np.zeros(3))
        data = dist.sample(128, rng)
        loss = MeanPointLoss()
        b = PrivacyBudget(0.5, 1e-5)
        w1, _ = phased_dp_sgd(data, loss, b, np.random.default_rng(21))
        w2, _ = phased_dp_sgd(data, loss, b, np.random.default_rng(21))
        np.testing.assert_array_equal(w1, w2)
