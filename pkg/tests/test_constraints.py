import numpy as np
import pytest

from dpsco.problems.constraints import (
    L1Ball,
    L2Ball,
    LpBall,
    project_l1_ball,
    project_lp_ball,
)
from dpsco.spaces import lp_norm


class TestL1Projection:
    def test_interior_unchanged(self):
        v = np.array([0.2, -0.3])
        np.testing.assert_array_equal(project_l1_ball(v, 1.0), v)

    def test_axis_point(self):
        np.testing.assert_allclose(project_l1_ball(np.array([2.0, 0.0]), 1.0), [1.0, 0.0])

    def test_symmetric_point(self):
        np.testing.assert_allclose(project_l1_ball(np.array([1.0, 1.0]), 1.0), [0.5, 0.5])

    def test_feasible_output(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            v = rng.standard_normal(20) * 3
            w = project_l1_ball(v, 1.0)
            assert lp_norm(w, 1) <= 1.0 + 1e-12


class TestLpProjection:
    def test_radial_scaling_at_p2(self):
        np.testing.assert_allclose(
            project_lp_ball(np.array([3.0, 4.0]), 2.0, 1.0), [0.6, 0.8]
        )

    def test_interior_unchanged(self):
        v = np.array([0.1, 0.1])
        np.testing.assert_array_equal(project_lp_ball(v, 1.5, 1.0), v)

    def test_symmetric_case(self):
        # both coordinates equal a with 2 a^1.5 = 1, i.e. a = 2^(-2/3)
        w = project_lp_ball(np.array([2.0, 2.0]), 1.5, 1.0)
        a = 2.0 ** (-2.0 / 3.0)
        np.testing.assert_allclose(w, [a, a], rtol=1e-8)

    def test_feasibility_slack(self):
        rng = np.random.default_rng(1)
        for p in (1.2, 1.5, 1.8, 3.0):
            for _ in range(50):
                v = rng.standard_normal(15) * 2
                w = project_lp_ball(v, p, 1.0, tol=1e-10)
                assert abs(lp_norm(w, p) - 1.0) <= 1e-9 or lp_norm(v, p) <= 1.0

    def test_projection_optimality(self):
        # ||v - proj(v)|| <= ||v - w|| for random feasible w
        rng = np.random.default_rng(2)
        p = 1.5
        for _ in range(20):
            v = rng.standard_normal(10) * 2
            w_star = project_lp_ball(v, p, 1.0)
            base = np.linalg.norm(v - w_star)
            for _ in range(50):
                cand = rng.standard_normal(10)
                cand = cand / max(1.0, lp_norm(cand, p))
                assert base <= np.linalg.norm(v - cand) + 1e-9

    def test_invalid_exponent(self):
        with pytest.raises(ValueError):
            project_lp_ball(np.ones(3), 1.0, 1.0)


class TestBallSets:
    @pytest.mark.parametrize(
        "ball",
        [L2Ball(2.0, 6), L1Ball(1.5, 6), LpBall(1.5, 1.0, 6)],
    )
    def test_projection_idempotent(self, ball):
        rng = np.random.default_rng(3)
        for _ in range(30):
            v = rng.standard_normal(6) * 4
            w = ball.project(v)
            np.testing.assert_allclose(ball.project(w), w, atol=1e-9)
            assert ball.gauge(w * (1 - 1e-12)) <= 1.0 + 1e-9

    @pytest.mark.parametrize(
        "ball",
        [L2Ball(2.0, 6), L1Ball(1.5, 6), LpBall(1.5, 1.0, 6)],
    )
    def test_support_gauge_duality(self, ball):
        # <x, y> <= gauge(x) * support(y)
        rng = np.random.default_rng(4)
        for _ in range(200):
            x = rng.standard_normal(6)
            y = rng.standard_normal(6)
            assert x @ y <= ball.gauge(x) * ball.support(y) + 1e-9

    def test_support_positively_homogeneous(self):
        ball = L1Ball(1.0, 5)
        xi = np.array([1.0, -2.0, 0.5, 0.0, 3.0])
        assert ball.support(3.0 * xi) == pytest.approx(3.0 * ball.support(xi))

    def test_l2_geometry(self):
        ball = L2Ball(2.0, 8)
        assert ball.diameter_l2 == pytest.approx(4.0)
        assert ball.c_min == pytest.approx(2.0)
        assert ball.c_min <= ball.diameter_l2

    def test_l1_geometry(self):
        ball = L1Ball(1.0, 4)
        assert ball.diameter_l2 == pytest.approx(2.0)
        # boundary point closest to the origin is a face center
        assert ball.c_min == pytest.approx(0.5)
        assert ball.diameter_primal(1.5) == pytest.approx(2.0)

    def test_lp_geometry(self):
        ball = LpBall(1.5, 1.0, 4)
        # primal diameter in its own norm
        assert ball.diameter_primal(1.5) == pytest.approx(2.0)
        # l2 extremes: vertices for p < 2
        assert ball.diameter_l2 == pytest.approx(2.0)
        assert ball.c_min == pytest.approx(4.0 ** (0.5 - 1 / 1.5))

    def test_support_batched(self):
        ball = L2Ball(1.0, 3)
        xi = np.array([[3.0, 4.0, 0.0], [0.0, 0.0, 2.0]])
        np.testing.assert_allclose(ball.support(xi), [5.0, 2.0])
