"""Symmetric convex constraint sets: projections, support functions, gauges.

Every set exposes Euclidean projection, the support function
h_C(xi) = sup_{w in C} <xi, w>, the Minkowski gauge (the norm whose unit
ball is C), diameters, and the distance from origin to the boundary.
"""

import math

import numpy as np

from ..errors import NumericError
from ..spaces import dual_exponent, lp_norm

__all__ = ["ConstraintSet", "L2Ball", "L1Ball", "LpBall", "project_l1_ball", "project_lp_ball"]


def project_l1_ball(v, radius):
    """Euclidean projection onto {||w||_1 <= radius} by sort-and-threshold."""
    if radius <= 0:
        raise ValueError("project_l1_ball: radius must be > 0")
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    u = np.sort(a)[::-1]
    cum = np.cumsum(u) - radius
    idx = np.arange(1, v.size + 1)
    mask = u > cum / idx
    rho = idx[mask][-1]
    theta = cum[rho - 1] / rho
    return np.sign(v) * np.maximum(a - theta, 0.0)


def project_lp_ball(v, p, radius, tol=1e-10, max_iter=200):
    """Euclidean projection onto {||w||_p <= radius} for p in (1, inf).

    Solved through the KKT system w_i + nu * p * |w_i|^(p-1) sign(w_i) = v_i
    with bisection on the multiplier nu; the returned point satisfies
    | ||w||_p - radius | <= tol when the constraint is active.  p = 2 is
    radial scaling, handled exactly.
    """
    if not (1.0 < p < math.inf):
        raise ValueError("project_lp_ball: p must be in (1, inf)")
    if radius <= 0 or tol <= 0:
        raise ValueError("project_lp_ball: radius and tol must be > 0")
    v = np.asarray(v, dtype=float)
    nrm = lp_norm(v, p)
    if nrm <= radius:
        return v.copy()
    if p == 2.0:
        return v * (radius / nrm)

    a = np.abs(v)

    def radial(nu):
        # Solve t + nu*p*t^(p-1) = a per coordinate (t in [0, a_i]).
        lo = np.zeros_like(a)
        hi = a.copy()
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            f = mid + nu * p * mid ** (p - 1.0) - a
            hi = np.where(f > 0, mid, hi)
            lo = np.where(f > 0, lo, mid)
        return 0.5 * (lo + hi)

    # Bracket the multiplier: ||w(0)||_p > radius; grow until below.
    nu_lo, nu_hi = 0.0, 1.0
    for _ in range(200):
        if lp_norm(radial(nu_hi), p) <= radius:
            break
        nu_hi *= 2.0
    else:
        raise NumericError("project_lp_ball: failed to bracket multiplier")

    w = None
    for _ in range(max_iter):
        nu = 0.5 * (nu_lo + nu_hi)
        w = radial(nu)
        gap = lp_norm(w, p) - radius
        if abs(gap) <= tol:
            return np.sign(v) * w
        if gap > 0:
            nu_lo = nu
        else:
            nu_hi = nu
    residual = abs(lp_norm(w, p) - radius)
    if residual <= tol:
        return np.sign(v) * w
    raise NumericError(
        f"project_lp_ball: bisection did not reach tol={tol}", residual=residual
    )


class ConstraintSet:
    """Interface for symmetric convex bodies."""

    def project(self, v):
        raise NotImplementedError

    def support(self, xi):
        """h_C(xi) = sup_{w in C} <xi, w>."""
        raise NotImplementedError

    def gauge(self, v):
        """Minkowski norm: min{r >= 0 : v in r*C}."""
        raise NotImplementedError

    def contains(self, v, slack=1e-9):
        return self.gauge(v) <= 1.0 + slack

    @property
    def diameter_l2(self):
        raise NotImplementedError

    def diameter_primal(self, p):
        """Diameter with respect to the ambient lp norm."""
        raise NotImplementedError

    @property
    def c_min(self):
        """Distance from the origin to the boundary."""
        raise NotImplementedError


class _NormBall(ConstraintSet):
    """Ball {||w||_a <= radius} for a norm exponent a."""

    def __init__(self, exponent, radius, d):
        if radius <= 0:
            raise ValueError("ball radius must be > 0")
        self.exponent = float(exponent)
        self.radius = float(radius)
        self.d = int(d)
        self._dual = dual_exponent(self.exponent)

    def support(self, xi):
        return self.radius * lp_norm(xi, self._dual)

    def gauge(self, v):
        return lp_norm(v, self.exponent) / self.radius

    @property
    def diameter_l2(self):
        # max ||v||_2 over the ball: r for a <= 2, r * d^(1/2 - 1/a) for a > 2.
        bump = max(0.0, 0.5 - 1.0 / self.exponent)
        return 2.0 * self.radius * self.d**bump

    def diameter_primal(self, p):
        bump = max(0.0, 1.0 / p - 1.0 / self.exponent)
        return 2.0 * self.radius * self.d**bump

    @property
    def c_min(self):
        # min ||v||_2 on the boundary: r * d^(1/2 - 1/a) for a <= 2, r above.
        bump = min(0.0, 0.5 - 1.0 / self.exponent)
        return self.radius * self.d**bump


class L2Ball(_NormBall):
    def __init__(self, radius, d):
        super().__init__(2.0, radius, d)

    def project(self, v):
        v = np.asarray(v, dtype=float)
        nrm = lp_norm(v, 2.0)
        if nrm <= self.radius:
            return v.copy()
        return v * (self.radius / nrm)


class L1Ball(_NormBall):
    def __init__(self, radius, d):
        super().__init__(1.0, radius, d)

    def project(self, v):
        return project_l1_ball(v, self.radius)


class LpBall(_NormBall):
    def __init__(self, exponent, radius, d, tol=1e-10):
        if not (1.0 < exponent < math.inf):
            raise ValueError("LpBall: exponent must be in (1, inf); use L1Ball/L2Ball otherwise")
        super().__init__(exponent, radius, d)
        self.tol = tol

    def project(self, v):
        return project_lp_ball(v, self.exponent, self.radius, tol=self.tol)
