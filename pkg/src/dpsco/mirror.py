"""lp-geometry private solvers built on mirror descent.

Three variants share the machinery here:

* ``noisy_reg_md`` -- unconstrained, Lipschitz losses: each step solves a
  regularized linearized subproblem in closed form through the mirror map
  and adds generalized Gaussian noise to the gradient.
* ``shuffled_truncated_md`` -- constrained, heavy-tailed gradients: the data
  is shuffled once and processed in one pass over batches, per-sample
  gradients are truncated to bound sensitivity, and per-sample noise is
  calibrated with amplification by shuffling (high-privacy regime only).
* ``batched_truncated_md`` -- same loop without shuffling; one noise draw
  per batch under parallel composition, valid for any epsilon in (0, 1).

``lambda`` is an overloaded symbol in this corner of the literature; here
``lambda_trunc`` always means the truncation offset and ``lambda_reg`` a
ridge weight, so the two cannot be silently confused.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NumericError, RefusalError
from .euclidean import phased_dp_sgd
from .mechanisms import GGNoiseSpec, gg_sample, shuffle_calibrate
from .problems.risk import empirical_grad
from .spaces import bregman, grad_phi, inv_grad_phi, lp_norm

__all__ = [
    "MDConfig",
    "TruncationStats",
    "noisy_reg_md",
    "truncate_gradient",
    "mirror_step_constrained",
    "shuffled_truncated_md",
    "batched_truncated_md",
    "lipschitz_high_p",
]


@dataclass
class MDConfig:
    """Mirror-descent solver configuration.

    ``T``, ``alpha_reg``, ``gamma`` and ``lambda_trunc`` default to the
    schedules the utility analysis prescribes; every hidden constant in
    those schedules is exposed (``c_*``) so bound sensitivity can be
    explored.  ``c_noise`` scales the noise draws themselves (0 reproduces
    the matched-seed noiseless reference).  ``bypass_regime_check`` disables
    the shuffling high-privacy gate -- for reference runs only, never for a
    private release.
    """

    space: object
    T: Optional[int] = None
    alpha_reg: Optional[float] = None
    gamma: Optional[float] = None
    lambda_trunc: Optional[float] = None
    c_t: float = 1.0
    c_lambda: float = 1.0
    c_noise: float = 1.0
    c_shuffle: float = 1.0
    c_eps: float = 1.0
    bypass_regime_check: bool = False
    step_tol: Optional[float] = None
    inner_cap: int = 10_000

    def __post_init__(self):
        if self.T is not None and self.T < 1:
            raise ValueError("MDConfig: T must be >= 1")
        if self.alpha_reg is not None and self.alpha_reg <= 0:
            raise ValueError("MDConfig: alpha_reg must be > 0")


@dataclass
class TruncationStats:
    """Counters for the gradient truncation step."""

    total: int = 0
    zeroed: int = 0
    max_pre_norm: float = 0.0

    def update(self, norms, kept_mask):
        norms = np.atleast_1d(norms)
        kept_mask = np.atleast_1d(kept_mask)
        self.total += norms.size
        self.zeroed += int((~kept_mask).sum())
        if norms.size:
            self.max_pre_norm = max(self.max_pre_norm, float(norms.max()))

    @property
    def zeroed_fraction(self):
        return self.zeroed / self.total if self.total else 0.0


class _WeightedAverage:
    """Running average with geometric weights ratio^t, overflow-free.

    Maintains V_t = (sum_{j<=t} ratio^j) / ratio^t via V_t = 1 + V_{t-1}/ratio,
    which stays bounded, so no intermediate quantity grows with t.
    """

    def __init__(self, ratio):
        self.ratio = ratio
        self.v = 0.0
        self.value = None

    def add(self, w):
        self.v = 1.0 + self.v / self.ratio
        if self.value is None:
            self.value = np.array(w, dtype=float)
        else:
            frac = 1.0 / self.v
            self.value = (1.0 - frac) * self.value + frac * np.asarray(w, dtype=float)


def noisy_reg_md(data, loss, cfg, budget, rng):
    """Noisy regularized mirror descent, unconstrained, 1 < p < 2.

    Each step minimizes
        <grad + g_t, w - w_t> + beta D_Phi(w, w_t) + alpha Phi(w)
    whose first-order condition gives the closed-form update
        w_{t+1} = (grad Phi)^{-1}((beta grad Phi(w_t) - grad - g_t) / (beta + alpha)).
    The output is the geometrically weighted average of w_2..w_{T+1} with
    ratio (2 beta + alpha) / (2 beta).
    """
    space = cfg.space
    if not (1.0 < space.p < 2.0):
        raise ValueError("noisy_reg_md requires 1 < p < 2")
    if getattr(loss, "norm_p", None) != space.p:
        raise ValueError("loss constants must be declared w.r.t. the ambient p-norm")
    n, d = data.n, data.d
    if d != space.d:
        raise ValueError("data dimension does not match the space")
    L, beta = loss.lipschitz, loss.smoothness
    kappa = space.kappa

    T = cfg.T
    if T is None:
        raw = cfg.c_t * (
            n * budget.epsilon * kappa / math.sqrt(d * math.log(1.0 / budget.delta))
        ) ** 0.4
        T = max(1, min(math.ceil(raw), max(1, n - 1)))
    alpha = cfg.alpha_reg
    if alpha is None:
        if T >= n:
            raise ValueError("automatic alpha_reg needs T < n; pass alpha_reg explicitly")
        alpha = (4.0 * beta / T) * math.log2(n / T)

    sigma2 = 64.0 * L**2 * kappa * T * math.log(1.0 / budget.delta) / (n**2 * budget.epsilon**2)
    noise = GGNoiseSpec(sigma2=sigma2, r=space.r_noise, d=d)

    w = np.zeros(d)
    avg = _WeightedAverage((2.0 * beta + alpha) / (2.0 * beta))
    for _ in range(T):
        g_t = cfg.c_noise * gg_sample(noise, rng)
        dual = beta * grad_phi(w, space) - empirical_grad(w, data, loss) - g_t
        w = inv_grad_phi(dual / (beta + alpha), space)
        avg.add(w)

    info = {"T": T, "alpha_reg": alpha, "sigma2": sigma2, "r_noise": space.r_noise}
    return avg.value, info


def regularized_md_step_residual(w_next, w_prev, grad_with_noise, beta, alpha, space):
    """Norm of the subproblem's first-order condition at w_next (test hook)."""
    res = (
        grad_with_noise
        + beta * (grad_phi(w_next, space) - grad_phi(w_prev, space))
        + alpha * grad_phi(w_next, space)
    )
    return float(np.linalg.norm(res))


def truncate_gradient(g, threshold, dual_exponent, stats=None):
    """Zero out g when its dual norm exceeds the threshold (inclusive keep).

    Returns the (possibly zeroed) gradient; updates ``stats`` in place when
    given.
    """
    if threshold <= 0:
        raise ValueError("truncate_gradient: threshold must be > 0")
    nrm = float(lp_norm(g, dual_exponent))
    keep = nrm <= threshold
    if stats is not None:
        stats.update(np.array([nrm]), np.array([keep]))
    return g if keep else np.zeros_like(g)


def _truncate_batch(G, threshold, dual_exponent, stats):
    norms = lp_norm(G, dual_exponent, axis=-1)
    keep = norms <= threshold
    stats.update(norms, keep)
    out = np.where(keep[:, None], G, 0.0)
    # The truncation bound must hold with probability 1.
    post = lp_norm(out, dual_exponent, axis=-1)
    if np.any(post > threshold * (1 + 1e-12)):
        raise AssertionError("truncation invariant violated")
    return out


def mirror_step_constrained(g_hat, w_prev, gamma, C, spec, tol=None, cap=10_000):
    """Constrained mirror-descent step.

    Minimizes <g_hat, w> + gamma * D_Phi(w, w_prev) over C.  The
    unconstrained minimizer has the closed form
    (grad Phi)^{-1}(grad Phi(w_prev) - g_hat/gamma); if it is feasible it is
    returned directly.  Otherwise projected gradient descent with Armijo
    backtracking runs until the Frank-Wolfe gap certifies suboptimality
    <= tol.  Returns (w, residual).
    """
    if tol is None:
        tol = 1e-8 * gamma * C.diameter_primal(spec.p) ** 2
    u = inv_grad_phi(grad_phi(w_prev, spec) - g_hat / gamma, spec)
    if C.contains(u, slack=1e-12):
        return u, 0.0

    gp_prev = grad_phi(w_prev, spec)

    def value(w):
        return float(g_hat @ w + gamma * bregman(w, w_prev, spec))

    def grad(w):
        return g_hat + gamma * (grad_phi(w, spec) - gp_prev)

    w = C.project(u)
    f_w = value(w)
    # Base step: the potential's curvature scales like gamma * weight.
    eta = 1.0 / (gamma * max(1.0, spec.potential_weight))
    residual = math.inf
    for _ in range(cap):
        gw = grad(w)
        residual = float(gw @ w + C.support(-gw))
        if residual <= tol:
            return w, residual
        accepted = False
        for _ in range(60):
            cand = C.project(w - eta * gw)
            f_cand = value(cand)
            decrease = float(gw @ (cand - w))
            if f_cand <= f_w + 0.25 * decrease:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break
        w, f_w = cand, f_cand
        eta *= 2.0
    if residual <= tol:
        return w, residual
    raise NumericError(
        f"mirror step did not reach tol={tol:.3e} within cap={cap}", residual=residual
    )


def _batch_bounds(n, T):
    """T batches of floor(n/T); the remainder joins the last batch."""
    b = n // T
    bounds = [(i * b, (i + 1) * b) for i in range(T)]
    lo, _ = bounds[-1]
    bounds[-1] = (lo, n)
    return b, bounds


def _lambda_floor(beta, M):
    return max(beta, 1.0) * M


def shuffled_truncated_md(data, loss, C, cfg, budget, rng):
    """Shuffled, truncated, noisy one-pass mirror descent (1 < p < 2).

    Privacy comes from per-sample generalized Gaussian noise amplified by
    shuffling, which is only valid in the high-privacy regime
    eps <= c_eps * sqrt(ln(n/delta)/n); outside it the solver refuses.
    """
    space = cfg.space
    if not (1.0 < space.p < 2.0):
        raise ValueError("shuffled_truncated_md requires 1 < p < 2")
    n, d = data.n, data.d
    beta = loss.smoothness
    kappa = space.kappa
    M = C.diameter_primal(space.p)
    logd = math.log(1.0 / budget.delta)

    lam = cfg.lambda_trunc
    if lam is None:
        lam = max(
            cfg.c_lambda
            * math.sqrt(n * budget.epsilon)
            / (kappa**2 * d * logd) ** 0.25,
            _lambda_floor(beta, M),
        )
    threshold = beta * M + lam

    calib = shuffle_calibrate(n, budget, threshold, kappa, c_sigma=cfg.c_shuffle, c_eps=cfg.c_eps)
    if not calib.valid and not cfg.bypass_regime_check:
        raise RefusalError(
            f"epsilon={budget.epsilon:.4g} outside the shuffling amplification regime; "
            f"maximum admissible epsilon at n={n} is {calib.max_epsilon:.4g}",
            requirement=calib.max_epsilon,
        )

    T = cfg.T
    if T is None:
        raw = cfg.c_t * M**2 * n**2 * budget.epsilon**2 / (lam**2 * d * logd)
        T = int(min(max(1, round(raw)), n))
    gamma = cfg.gamma if cfg.gamma is not None else math.sqrt(T)

    perm = rng.permutation(n)  # Fisher-Yates under the hood; rng-injected
    shuffled = data.subset(perm)
    _, bounds = _batch_bounds(n, T)
    noise = GGNoiseSpec(sigma2=calib.sigma**2, r=space.r_noise, d=d) if calib.sigma > 0 else None

    stats = TruncationStats()
    w = np.zeros(d)
    avg = _WeightedAverage(1.0)  # uniform gamma_t => plain average
    residuals = []
    for lo, hi in bounds:
        X = shuffled.X[lo:hi]
        y = None if shuffled.y is None else shuffled.y[lo:hi]
        G = loss.grads(w, X, y)
        G = _truncate_batch(G, threshold, space.q, stats)
        Z = cfg.c_noise * gg_sample(noise, rng, size=hi - lo) if noise is not None else 0.0
        g_hat = (G + Z).mean(axis=0) if noise is not None else G.mean(axis=0)
        w, res = mirror_step_constrained(
            g_hat, w, gamma, C, space, tol=cfg.step_tol, cap=cfg.inner_cap
        )
        residuals.append(res)
        avg.add(w)

    out = avg.value
    if not C.contains(out, slack=1e-9):
        raise AssertionError("averaged iterate left the constraint set")
    info = {
        "T": T,
        "lambda_trunc": lam,
        "threshold": threshold,
        "sigma": calib.sigma,
        "gamma": gamma,
        "truncation": stats,
        "max_step_residual": max(residuals) if residuals else 0.0,
        "regime_valid": calib.valid,
    }
    return out, info


def batched_truncated_md(data, loss, C, cfg, budget, rng):
    """Truncated batched mirror descent without shuffling (any 0 < eps < 1).

    Disjoint batches compose in parallel, so each step adds a single
    generalized Gaussian draw calibrated to the batch-mean sensitivity.
    """
    space = cfg.space
    if not (1.0 < space.p < 2.0):
        raise ValueError("batched_truncated_md requires 1 < p < 2")
    n, d = data.n, data.d
    beta = loss.smoothness
    kappa = space.kappa
    M = C.diameter_primal(space.p)
    logd = math.log(1.0 / budget.delta)

    lam = cfg.lambda_trunc
    if lam is None:
        lam = max(
            cfg.c_lambda
            * (math.sqrt(n * budget.epsilon) * M / (kappa * (d * logd) ** 0.25)) ** (2.0 / 3.0),
            _lambda_floor(beta, M),
        )
    threshold = beta * M + lam

    T = cfg.T
    if T is None:
        raw = cfg.c_t * n * budget.epsilon / (M * lam * math.sqrt(d * logd))
        T = max(1, round(raw))
        if T > n:
            warnings.warn(f"schedule T={T} exceeds n={n}; clamping to n", stacklevel=2)
            T = n
    gamma = cfg.gamma if cfg.gamma is not None else math.sqrt(T)

    b, bounds = _batch_bounds(n, T)
    sigma2 = kappa * threshold**2 * logd / (b**2 * budget.epsilon**2)
    noise = GGNoiseSpec(sigma2=sigma2, r=space.r_noise, d=d)

    stats = TruncationStats()
    w = np.zeros(d)
    avg = _WeightedAverage(1.0)
    residuals = []
    for lo, hi in bounds:
        X = data.X[lo:hi]
        y = None if data.y is None else data.y[lo:hi]
        G = _truncate_batch(loss.grads(w, X, y), threshold, space.q, stats)
        g_hat = G.mean(axis=0) + cfg.c_noise * gg_sample(noise, rng)
        w, res = mirror_step_constrained(
            g_hat, w, gamma, C, space, tol=cfg.step_tol, cap=cfg.inner_cap
        )
        residuals.append(res)
        avg.add(w)

    info = {
        "T": T,
        "lambda_trunc": lam,
        "threshold": threshold,
        "sigma2_step": sigma2,
        "gamma": gamma,
        "truncation": stats,
        "max_step_residual": max(residuals) if residuals else 0.0,
    }
    return avg.value, info


def lipschitz_high_p(data, loss, budget, rng, eta=None, noise_multiplier=1.0):
    """Lipschitz DP-SCO for 2 <= p <= inf via the Euclidean phased solver.

    For p >= 2 the dual exponent is <= 2, so the declared constants are
    valid Euclidean constants as they stand; only the diameter conversion
    d^{1/2 - 1/p} is recorded for interpreting the guarantee.
    """
    p = getattr(loss, "norm_p", 2.0)
    if not (2.0 <= p):
        raise ValueError("lipschitz_high_p requires 2 <= p <= inf")
    d = data.d
    conversion = d**0.5 if p == math.inf else d ** (0.5 - 1.0 / p)
    w, info = phased_dp_sgd(
        data, loss, budget, rng, eta=eta, noise_multiplier=noise_multiplier
    )
    info["diameter_conversion"] = conversion
    return w, info
