"""Synthetic data distributions and the Dataset container.

Distributions certify the constants their paired loss declares: bounded
feature norms for the Lipschitz losses, an analytic second-moment bound on
gradient noise for the heavy-tailed generator.  Sampling is deterministic
given (distribution parameters, seed).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, stats

from ..mechanisms import sample_lr_sphere

__all__ = [
    "Dataset",
    "dataset_to_csv",
    "dataset_from_csv",
    "BallCloud",
    "LogisticSphere",
    "HeavyTailLinear",
]


@dataclass(frozen=True)
class Dataset:
    """n rows of d-dimensional features with optional labels."""

    X: np.ndarray
    y: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2 or X.shape[0] < 1:
            raise ValueError("Dataset: X must be (n, d) with n >= 1")
        if not np.all(np.isfinite(X)):
            raise ValueError("Dataset: non-finite feature entries")
        object.__setattr__(self, "X", X)
        if self.y is not None:
            y = np.asarray(self.y, dtype=float)
            if y.shape != (X.shape[0],):
                raise ValueError("Dataset: y must have shape (n,)")
            if not np.all(np.isfinite(y)):
                raise ValueError("Dataset: non-finite labels")
            object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    def subset(self, idx):
        return Dataset(self.X[idx], None if self.y is None else self.y[idx])


def dataset_to_csv(data, path):
    """Write a dataset as CSV with header x_1..x_d[,y]."""
    cols = [f"x_{j + 1}" for j in range(data.d)]
    mat = data.X
    if data.y is not None:
        cols.append("y")
        mat = np.column_stack([data.X, data.y])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for row in mat:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def dataset_from_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [list(map(float, line.strip().split(","))) for line in fh if line.strip()]
    mat = np.asarray(rows, dtype=float)
    if header and header[-1] == "y":
        return Dataset(mat[:, :-1], mat[:, -1])
    return Dataset(mat)


def _uniform_ball(d, rng, size, exponent=2.0):
    # Uniform in the unit l_exponent ball: cone direction scaled by U^(1/d).
    theta = sample_lr_sphere(d, exponent, rng, size=size)
    u = rng.uniform(size=(size, 1)) ** (1.0 / d)
    return theta * u


class BallCloud:
    """Points mu + spread * U with U uniform in the unit l2 ball.

    Pairs with the quadratic point loss: the population risk has the closed
    form L(w) = 0.5 ||w - mu||_2^2 + 0.5 tr(Cov) with
    tr(Cov) = spread^2 * d / (d + 2).
    """

    name = "ball_cloud"

    def __init__(self, mu, spread=1.0):
        self.mu = np.asarray(mu, dtype=float)
        self.spread = float(spread)
        self.d = self.mu.size

    def sample(self, n, rng):
        U = _uniform_ball(self.d, rng, n)
        return Dataset(self.mu[None, :] + self.spread * U)

    @property
    def true_minimizer(self):
        return self.mu.copy()

    @property
    def trace_cov(self):
        return self.spread**2 * self.d / (self.d + 2.0)

    def population_risk(self, w):
        diff = np.asarray(w, dtype=float) - self.mu
        return 0.5 * float(diff @ diff) + 0.5 * self.trace_cov

    def feature_radius(self):
        """Certified bound on ||x||_2 over the support."""
        return math.sqrt(float(self.mu @ self.mu)) + self.spread


class LogisticSphere:
    """Well-specified logistic model with features on a sphere.

    Features are drawn from the cone measure of the l_sphere_exponent sphere
    of the given radius (so the dual-norm feature bound certifying the
    logistic loss's Lipschitz constant is exactly ``radius`` when
    sphere_exponent matches the dual exponent of the ambient norm).  Labels
    are +-1 with P(y=1|z) = sigmoid(<w_star, z>); the population risk is
    minimized at w_star.
    """

    name = "logistic_sphere"

    def __init__(self, w_star, sphere_exponent=2.0, radius=1.0):
        self.w_star = np.asarray(w_star, dtype=float)
        self.sphere_exponent = float(sphere_exponent)
        self.radius = float(radius)
        self.d = self.w_star.size

    def sample(self, n, rng):
        Z = self.radius * sample_lr_sphere(self.d, self.sphere_exponent, rng, size=n)
        probs = 1.0 / (1.0 + np.exp(-(Z @ self.w_star)))
        y = np.where(rng.uniform(size=n) < probs, 1.0, -1.0)
        return Dataset(Z, y)

    @property
    def true_minimizer(self):
        return self.w_star.copy()

    population_risk = None  # no closed form; evaluated by Monte Carlo

    def feature_radius(self, dual_exponent=2.0):
        # Draws have sphere_exponent-norm equal to radius; convert to the
        # requested dual norm by the standard norm-comparison factor.
        a, b = self.sphere_exponent, dual_exponent
        if b <= a:
            return self.radius * self.d ** (1.0 / b - 1.0 / a)
        return self.radius


class HeavyTailLinear:
    """Linear model with Student-t noise: y = <w_star, z> + scale * t(dof).

    Features live on the unit l_sphere_exponent sphere.  For dof = 3 the
    noise has finite variance but infinite fourth moment, so per-sample
    gradients are heavy-tailed while the second-moment bound required of the
    gradient noise stays certifiable: for a loss whose gradient is
    psi(residual) * z with |psi| <= psi_max and ||z|| <= 1 in the relevant
    dual norm, E||grad l - grad L||^2 <= 4 psi_max^2 =: sigma_sq_bound.
    """

    name = "heavy_tail_linear"

    def __init__(self, w_star, sphere_exponent=2.0, t_dof=3.0, t_scale=1.0):
        if t_dof <= 2:
            raise ValueError("HeavyTailLinear: need dof > 2 for finite gradient variance")
        self.w_star = np.asarray(w_star, dtype=float)
        self.sphere_exponent = float(sphere_exponent)
        self.t_dof = float(t_dof)
        self.t_scale = float(t_scale)
        self.d = self.w_star.size

    def sample(self, n, rng):
        Z = sample_lr_sphere(self.d, self.sphere_exponent, rng, size=n)
        noise = self.t_scale * rng.standard_t(self.t_dof, size=n)
        return Dataset(Z, Z @ self.w_star + noise)

    @property
    def true_minimizer(self):
        # Symmetric unimodal noise and an even convex penalty: the population
        # risk is minimized where every residual distribution is centered.
        return self.w_star.copy()

    def sigma_sq_bound(self, psi_max):
        """Analytic second-moment bound on gradient noise, 4 * psi_max^2."""
        return 4.0 * float(psi_max) ** 2

    def noise_variance(self):
        return self.t_scale**2 * self.t_dof / (self.t_dof - 2.0)

    def population_risk(self, w, loss):
        """Population risk of the paired regression loss by 1-D quadrature.

        The residual at w decomposes as <w - w_star, z> + noise; for w =
        w_star it reduces to E[loss_1d(noise)], computed by quadrature
        against the t density.  Only that case has a closed form; other
        points go through Monte Carlo.
        """
        w = np.asarray(w, dtype=float)
        if not np.allclose(w, self.w_star):
            return None
        dens = stats.t(self.t_dof, scale=self.t_scale).pdf
        dh = loss.huber_delta

        def f(r):
            return dh**2 * (math.sqrt(1.0 + (r / dh) ** 2) - 1.0) * dens(r)

        val, _ = integrate.quad(f, -np.inf, np.inf, limit=200)
        return val
