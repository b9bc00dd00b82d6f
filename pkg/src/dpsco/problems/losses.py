"""Convex loss models with declared regularity constants.

Each loss declares the norm its constants refer to (``norm_p``: 2.0 for the
Euclidean solvers, the ambient p for mirror-descent runs), its Lipschitz
constant, smoothness, strong convexity and a Hessian-rank bound.  The
declared constants are promises the paired data distribution must certify
(see ``dpsco.problems.distributions``); tests sample-check them.

All evaluation is vectorized over the rows of a dataset: ``values`` returns
per-sample losses (n,), ``grads`` per-sample gradients (n, d).
"""

import math

import numpy as np

__all__ = ["LossModel", "LogisticLoss", "MeanPointLoss", "PseudoHuberLoss"]


class LossModel:
    """Base class carrying the declared constants.

    Attributes
    ----------
    lipschitz : float
        L with |l(w1,x) - l(w2,x)| <= L ||w1 - w2|| for the declared norm.
    smoothness : float
        beta with ||grad l(w1,x) - grad l(w2,x)||_* <= beta ||w1 - w2||.
    strong_convexity : float
        Modulus with respect to the Euclidean norm (0 for merely convex).
    norm_p : float
        Exponent of the norm the L/beta constants refer to.
    hessian_rank : int or None
        Upper bound on rank of the per-sample Hessian; None means full.
    """

    lipschitz = math.inf
    smoothness = math.inf
    strong_convexity = 0.0
    norm_p = 2.0
    hessian_rank = None

    def values(self, w, X, y=None):
        raise NotImplementedError

    def grads(self, w, X, y=None):
        raise NotImplementedError

    def value(self, w, x, y=None):
        X = np.asarray(x, dtype=float).reshape(1, -1)
        yy = None if y is None else np.asarray([y], dtype=float)
        return float(self.values(w, X, yy)[0])

    def gradient(self, w, x, y=None):
        X = np.asarray(x, dtype=float).reshape(1, -1)
        yy = None if y is None else np.asarray([y], dtype=float)
        return self.grads(w, X, yy)[0]

    def rank_bound(self, d):
        """r = min{d, 2 * rank bound}, the effective rank used by solvers."""
        if self.hessian_rank is None:
            return d
        return min(d, 2 * self.hessian_rank)


class LogisticLoss(LossModel):
    """Logistic loss over linear predictors, l(w,(z,y)) = log(1 + exp(-y <w,z>)).

    ``feature_dual_bound`` is the certified bound on ||z|| in the dual of
    the declared norm; it yields L = bound and beta = bound^2 / 4.
    """

    hessian_rank = 1

    def __init__(self, feature_dual_bound=1.0, norm_p=2.0):
        self.feature_dual_bound = float(feature_dual_bound)
        self.norm_p = float(norm_p)
        self.lipschitz = self.feature_dual_bound
        self.smoothness = self.feature_dual_bound**2 / 4.0
        self.strong_convexity = 0.0

    def values(self, w, X, y=None):
        if y is None:
            raise ValueError("LogisticLoss requires labels")
        margins = y * (X @ w)
        return np.logaddexp(0.0, -margins)

    def grads(self, w, X, y=None):
        if y is None:
            raise ValueError("LogisticLoss requires labels")
        margins = y * (X @ w)
        # d/du log(1+e^{-u}) = -sigmoid(-u)
        coef = -y * _sigmoid(-margins)
        return coef[:, None] * X


def _sigmoid(u):
    out = np.empty_like(u)
    pos = u >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-u[pos]))
    e = np.exp(u[~pos])
    out[~pos] = e / (1.0 + e)
    return out


class MeanPointLoss(LossModel):
    """Quadratic point loss l(theta; x) = 0.5 ||theta - x||_2^2.

    1-strongly convex and 1-smooth in l2 with a full-rank Hessian; the
    Lipschitz constant over a constraint set of radius R with data of radius
    rho is R + rho (declared via the constructor).
    """

    hessian_rank = None  # identity Hessian: full rank
    norm_p = 2.0

    def __init__(self, domain_radius=1.0, constraint_radius=1.0):
        self.lipschitz = float(domain_radius) + float(constraint_radius)
        self.smoothness = 1.0
        self.strong_convexity = 1.0

    def values(self, w, X, y=None):
        diff = w[None, :] - X
        return 0.5 * (diff * diff).sum(axis=1)

    def grads(self, w, X, y=None):
        return w[None, :] - X


class PseudoHuberLoss(LossModel):
    """Pseudo-Huber regression loss, smooth and Lipschitz, for heavy-tailed runs.

    l(w,(z,y)) = delta^2 (sqrt(1 + (r/delta)^2) - 1) with residual
    r = <w,z> - y.  The gradient magnitude is capped at delta * ||z||, so
    L = delta * feature_dual_bound and beta = feature_dual_bound^2.
    """

    hessian_rank = 1

    def __init__(self, huber_delta=1.0, feature_dual_bound=1.0, norm_p=2.0):
        self.huber_delta = float(huber_delta)
        self.feature_dual_bound = float(feature_dual_bound)
        self.norm_p = float(norm_p)
        self.lipschitz = self.huber_delta * self.feature_dual_bound
        self.smoothness = self.feature_dual_bound**2
        self.strong_convexity = 0.0

    def values(self, w, X, y=None):
        if y is None:
            raise ValueError("PseudoHuberLoss requires labels")
        res = X @ w - y
        dh = self.huber_delta
        return dh**2 * (np.sqrt(1.0 + (res / dh) ** 2) - 1.0)

    def grads(self, w, X, y=None):
        if y is None:
            raise ValueError("PseudoHuberLoss requires labels")
        res = X @ w - y
        dh = self.huber_delta
        coef = res / np.sqrt(1.0 + (res / dh) ** 2)
        return coef[:, None] * X
