"""Noise mechanisms and privacy accounting.

Calibration formulas are exact arithmetic (bit-for-bit reproducible given
identical inputs).  Sampling routines take an explicit ``numpy.random.
Generator``; there is no hidden global state.  The random source is
statistical, not cryptographic.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PrivacyBudget",
    "GGNoiseSpec",
    "ShuffleCalibration",
    "gaussian_noise_sigma2",
    "gg_calibrate",
    "gg_sample",
    "sample_lr_sphere",
    "advanced_composition",
    "shuffle_calibrate",
]


@dataclass(frozen=True)
class PrivacyBudget:
    """An (epsilon, delta) differential-privacy target."""

    epsilon: float
    delta: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"PrivacyBudget: epsilon must be > 0, got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"PrivacyBudget: delta must be in (0,1), got {self.delta}")


@dataclass(frozen=True)
class GGNoiseSpec:
    """Parameters of a generalized Gaussian: density prop. to exp(-||z||_r^2 / (2 sigma2))."""

    sigma2: float
    r: float
    d: int

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError("GGNoiseSpec: sigma2 must be > 0")
        if not self.r >= 1:
            raise ValueError("GGNoiseSpec: r must be >= 1")
        if self.d < 1:
            raise ValueError("GGNoiseSpec: d must be >= 1")


def gaussian_noise_sigma2(l2_sensitivity, budget):
    """Variance of the Gaussian mechanism: 2 * Delta^2 * ln(1.25/delta) / eps^2.

    A zero sensitivity yields 0 (noiseless release is valid).
    """
    if l2_sensitivity < 0:
        raise ValueError("sensitivity must be nonnegative")
    if l2_sensitivity == 0:
        return 0.0
    return (
        2.0
        * l2_sensitivity**2
        * math.log(1.25 / budget.delta)
        / budget.epsilon**2
    )


def gg_calibrate(sensitivity_star, kappa, budget):
    """Variance of the generalized Gaussian mechanism: 2 kappa ln(1/delta) s^2 / eps^2.

    ``sensitivity_star`` is the dual-norm sensitivity of the released query;
    ``kappa`` the regularity constant of the dual space.
    """
    if kappa < 1:
        raise ValueError("gg_calibrate: kappa must be >= 1")
    if sensitivity_star < 0:
        raise ValueError("gg_calibrate: sensitivity must be nonnegative")
    return (
        2.0
        * kappa
        * math.log(1.0 / budget.delta)
        * sensitivity_star**2
        / budget.epsilon**2
    )


def _gamma_small_shape(shape, size, rng):
    # Gamma(a) for a < 1 via the boost trick: Gamma(a+1) * U^(1/a).
    # Avoids the rejection sampler's bad acceptance rate at small shapes.
    g = rng.gamma(shape + 1.0, size=size)
    u = rng.uniform(size=size)
    return g * u ** (1.0 / shape)


def sample_lr_sphere(d, r, rng, size=None):
    """Directions from the cone measure of the unit l_r sphere.

    Coordinates u_i = zeta_i * G_i^(1/r) with G_i ~ Gamma(1/r) and zeta_i
    uniform signs; the normalized u/||u||_r follows the cone measure, which
    is the exact directional law of any density depending on z only through
    ||z||_r.
    """
    shape = (d,) if size is None else (size, d)
    a = 1.0 / r
    g = _gamma_small_shape(a, shape, rng) if a < 1.0 else rng.gamma(a, size=shape)
    signs = rng.integers(0, 2, size=shape) * 2 - 1
    u = signs * g ** (1.0 / r)
    nrm = (np.abs(u) ** r).sum(axis=-1, keepdims=True) ** (1.0 / r)
    nrm = np.where(nrm > 0, nrm, 1.0)
    return u / nrm


def gg_sample(spec, rng, size=None):
    """Exact draw(s) from the generalized Gaussian GG_{||.||_r}(0, sigma2).

    Radius-direction decomposition: the density over R^d depends on z only
    through ||z||_r, so z = R * theta with R = sigma * chi_d (independent of
    theta) and theta from the cone measure of the l_r unit sphere.
    """
    sigma = math.sqrt(spec.sigma2)
    theta = sample_lr_sphere(spec.d, spec.r, rng, size=size)
    rshape = None if size is None else (size, 1)
    radius = sigma * np.sqrt(rng.chisquare(spec.d, size=None if size is None else size))
    if size is not None:
        radius = radius.reshape(rshape)
    return radius * theta


def advanced_composition(target, T):
    """Per-step budget under advanced composition.

    Returns (eps_step, delta_step) = (eps / (2 sqrt(2 T ln(2/delta))), delta/T);
    running T mechanisms at this per-step level yields (eps, T*delta_step +
    delta) overall.  The stated regime is eps < 1.
    """
    if int(T) != T or T < 1:
        raise ValueError(f"advanced_composition: T must be a positive integer, got {T}")
    if not target.epsilon < 1:
        raise ValueError("advanced_composition: stated regime requires epsilon < 1")
    eps_step = target.epsilon / (2.0 * math.sqrt(2.0 * T * math.log(2.0 / target.delta)))
    delta_step = target.delta / T
    return eps_step, delta_step


@dataclass(frozen=True)
class ShuffleCalibration:
    """Result of shuffle-amplified noise calibration."""

    sigma: float
    valid: bool
    max_epsilon: float


def shuffle_calibrate(n, budget, sensitivity_star, kappa, c_sigma=1.0, c_eps=1.0):
    """Per-sample noise scale under amplification by shuffling.

    sigma = c_sigma * kappa * s * sqrt(ln(1/delta) * ln(n/delta)) / (eps * sqrt(n)).

    The amplification argument only covers the high-privacy regime; the
    calibration is ``valid`` iff eps <= c_eps * sqrt(ln(n/delta) / n).
    Callers must refuse to run when ``valid`` is False.
    """
    if n < 2:
        raise ValueError("shuffle_calibrate: n must be >= 2")
    log_nd = math.log(n / budget.delta)
    sigma = (
        c_sigma
        * kappa
        * sensitivity_star
        * math.sqrt(math.log(1.0 / budget.delta) * log_nd)
        / (budget.epsilon * math.sqrt(n))
    )
    max_eps = c_eps * math.sqrt(log_nd / n)
    return ShuffleCalibration(sigma=sigma, valid=budget.epsilon <= max_eps, max_epsilon=max_eps)
