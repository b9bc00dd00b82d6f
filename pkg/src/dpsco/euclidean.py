"""Euclidean private solvers: approximate objective perturbation and phased SGD.

Objective perturbation privatizes constrained ERM by adding a random linear
term and a ridge penalty, minimizing to a certified accuracy alpha, then
perturbing and projecting the result.  The inner optimizer is projected
gradient descent run for a deterministic iteration count derived from its
linear convergence rate, so the accuracy certificate is unconditional.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RefusalError
from .mechanisms import PrivacyBudget
from .problems.risk import empirical_grad, empirical_risk, gaussian_width_mc

__all__ = ["ObjPConfig", "SmoothObjective", "inner_solve", "app_objp", "app_objp_sc", "phased_dp_sgd"]


@dataclass
class ObjPConfig:
    """Configuration for the objective-perturbation solvers.

    ``alpha_opt`` is the optimization accuracy handed to the inner solver;
    when None it defaults to the utility-driven ceiling, which involves the
    (estimated) Gaussian width of the constraint set.  ``lambda_reg`` is the
    ridge coefficient; None selects the standard schedule for each solver.
    ``noise_multiplier`` scales the noise draws (0 gives the matched-seed
    noiseless reference path).  ``check_release_distance`` re-solves to
    higher accuracy and asserts the certified bound on the distance between
    the released approximate minimizer and the exact one.
    """

    budget: PrivacyBudget
    alpha_opt: Optional[float] = None
    lambda_reg: Optional[float] = None
    noise_multiplier: float = 1.0
    check_release_distance: bool = True
    width_samples: int = 20_000

    def __post_init__(self):
        if self.alpha_opt is not None and not (0.0 < self.alpha_opt <= 1.0):
            raise ValueError("ObjPConfig: alpha_opt must be in (0, 1]")


@dataclass
class SmoothObjective:
    """A strongly convex, smooth objective handed to the inner optimizer."""

    value: callable
    grad: callable
    smoothness: float
    strong_convexity: float


def _pgd(obj, C, start, iters):
    step = 1.0 / obj.smoothness
    w = C.project(np.asarray(start, dtype=float))
    for _ in range(iters):
        w = C.project(w - step * obj.grad(w))
    return w


def pgd_iteration_count(obj, C, alpha):
    """Deterministic iteration count certifying alpha-suboptimality.

    Linear convergence of projected gradient descent on a strongly convex,
    smooth objective gives J(w_K) - min J <= alpha after
    K = ceil((beta/lam) * ln(beta * ||C||_2^2 / (2 alpha))).
    """
    if alpha <= 0:
        raise ValueError("inner accuracy alpha must be > 0")
    if obj.strong_convexity <= 0:
        raise ValueError("inner_solve requires a strongly convex objective")
    ratio = obj.smoothness / obj.strong_convexity
    arg = obj.smoothness * C.diameter_l2**2 / (2.0 * alpha)
    return max(1, math.ceil(ratio * math.log(max(arg, 1.0 + 1e-12))))


def inner_solve(obj, C, alpha, start):
    """alpha-accurate constrained minimizer of ``obj``, certified by iteration count."""
    return _pgd(obj, C, start, pgd_iteration_count(obj, C, alpha))


def _gaussian_width_estimate(C, m):
    # Deterministic internal seed: the width only sets the default accuracy
    # ceiling, and a fixed seed keeps solver outputs reproducible.
    est, _ = gaussian_width_mc(C, m, np.random.default_rng(20_170_419))
    return est


def _alpha_ceiling(L, D, n, budget, width):
    first = L * D / n**1.5
    second = budget.epsilon**2 * L * D**3 / (width**2 * math.log(1.0 / budget.delta) * n**2.5)
    return min(first, second, 1.0)


def _alpha_ceiling_sc(L, D, n, budget, width, delta_c):
    first = L**2 * D**2 / (delta_c * n**2)
    second = (
        L**4
        * D**6
        * budget.epsilon**2
        / (delta_c**3 * n**4 * width**2 * math.log(1.0 / budget.delta))
    )
    return min(first, second, 1.0)


def _perturbed_objective(data, loss, G, lam):
    n = data.n

    def value(w):
        return empirical_risk(w, data, loss) + float(G @ w) / n + lam * float(w @ w)

    def grad(w):
        return empirical_grad(w, data, loss) + G / n + 2.0 * lam * w

    return SmoothObjective(
        value=value,
        grad=grad,
        smoothness=loss.smoothness + 2.0 * lam,
        strong_convexity=loss.strong_convexity + 2.0 * lam,
    )


def _solve_with_surrogate(obj, C, alpha, start, check, release_bound):
    """Run PGD to the certified count; optionally continue and assert the bound.

    The surrogate continues the same trajectory to accuracy alpha/100, so
    ||theta2 - surrogate|| <= sqrt(2 alpha / lam) + sqrt(2 (alpha/100) / lam)
    must hold whenever the certificates do.
    """
    k2 = pgd_iteration_count(obj, C, alpha)
    theta2 = _pgd(obj, C, start, k2)
    info = {}
    if check:
        ks = pgd_iteration_count(obj, C, alpha / 100.0)
        surrogate = _pgd(obj, C, theta2, max(0, ks - k2))
        dist = float(np.linalg.norm(theta2 - surrogate))
        bound = release_bound * (1.0 + math.sqrt(1.0 / 100.0))
        if dist > bound:
            raise AssertionError(
                f"release distance {dist:.3e} exceeds certified bound {bound:.3e}"
            )
        info["release_distance"] = dist
        info["release_bound"] = bound
    return theta2, info


def _warn_large_n(n, r, beta, D, L, d, budget):
    if n < r**2 * beta**2 * D**2 / (budget.epsilon**2 * L**2):
        warnings.warn(
            "n below the large-n regime of the utility guarantee "
            "(n >= r^2 beta^2 ||C||^2 / (eps^2 L^2)); privacy is unaffected",
            stacklevel=3,
        )
    if n < math.sqrt(d * math.log(1.0 / budget.delta)) / budget.epsilon:
        warnings.warn(
            "n below sqrt(d log(1/delta))/eps; utility bound constants degrade",
            stacklevel=3,
        )


def app_objp(data, loss, C, cfg, rng):
    """Approximate objective perturbation for convex smooth Lipschitz losses.

    Returns (theta_hat, info).  Raises RefusalError when the smoothness
    precondition beta <= eps * n * lambda / r fails, since that condition is
    what makes the perturbed-objective release private.
    """
    budget = cfg.budget
    n, d = data.n, data.d
    L, beta = loss.lipschitz, loss.smoothness
    r = loss.rank_bound(d)
    D = C.diameter_l2

    lam = cfg.lambda_reg if cfg.lambda_reg is not None else L / (math.sqrt(n) * D)
    if beta > budget.epsilon * n * lam / r:
        n_min = math.ceil((r * beta * D / (budget.epsilon * L)) ** 2)
        raise RefusalError(
            f"smoothness precondition failed: beta={beta:.3g} > eps*n*lambda/r="
            f"{budget.epsilon * n * lam / r:.3g}; need n >= {n_min}",
            requirement=n_min,
        )
    _warn_large_n(n, r, beta, D, L, d, budget)

    width = _gaussian_width_estimate(C, cfg.width_samples)
    alpha = cfg.alpha_opt if cfg.alpha_opt is not None else _alpha_ceiling(L, D, n, budget, width)

    sigma1 = math.sqrt(128.0 * L**2 * math.log(2.5 / budget.delta)) / budget.epsilon
    G = cfg.noise_multiplier * sigma1 * rng.standard_normal(d)
    obj = _perturbed_objective(data, loss, G, lam)

    release_bound = math.sqrt(2.0 * alpha / lam)
    theta2, info = _solve_with_surrogate(
        obj, C, alpha, np.zeros(d), cfg.check_release_distance, release_bound
    )

    sigma2 = math.sqrt(64.0 * alpha * math.log(2.5 / budget.delta) / lam) / budget.epsilon
    H = cfg.noise_multiplier * sigma2 * rng.standard_normal(d)
    theta_hat = C.project(theta2 + H)
    info.update(lam=lam, alpha=alpha, sigma1=sigma1, sigma2=sigma2, width=width)
    return theta_hat, info


def app_objp_sc(data, loss, C, cfg, rng):
    """Objective perturbation for strongly convex losses.

    The loss's own curvature replaces most (or all) of the ridge term:
    lambda = max{r beta / (eps n) - Delta, 0}, and the output-perturbation
    scale uses the strong convexity measured in the Minkowski norm of C.
    """
    budget = cfg.budget
    n, d = data.n, data.d
    L, beta = loss.lipschitz, loss.smoothness
    delta2 = loss.strong_convexity
    if delta2 <= 0:
        raise ValueError("app_objp_sc requires a strongly convex loss")
    delta_c = delta2 * C.c_min**2  # modulus w.r.t. the Minkowski norm of C
    r = loss.rank_bound(d)
    D = C.diameter_l2

    lam = (
        cfg.lambda_reg
        if cfg.lambda_reg is not None
        else max(r * beta / (budget.epsilon * n) - delta2, 0.0)
    )
    if beta > budget.epsilon * n * (lam + delta2) / r:
        n_min = math.ceil(r * beta / (budget.epsilon * (lam + delta2)))
        raise RefusalError(
            f"smoothness precondition failed: beta={beta:.3g} > eps*n*(lambda+Delta)/r; "
            f"need n >= {n_min}",
            requirement=n_min,
        )
    _warn_large_n(n, r, beta, D, L, d, budget)

    width = _gaussian_width_estimate(C, cfg.width_samples)
    alpha = (
        cfg.alpha_opt
        if cfg.alpha_opt is not None
        else _alpha_ceiling_sc(L, D, n, budget, width, delta_c)
    )

    sigma1 = math.sqrt(128.0 * L**2 * math.log(2.5 / budget.delta)) / budget.epsilon
    G = cfg.noise_multiplier * sigma1 * rng.standard_normal(d)
    obj = _perturbed_objective(data, loss, G, lam)

    # Calibration-level bound on ||theta2 - theta1||_2 via the C-norm curvature.
    release_bound = math.sqrt(2.0 * alpha * D**2 / delta_c)
    theta2, info = _solve_with_surrogate(
        obj, C, alpha, np.zeros(d), cfg.check_release_distance, release_bound
    )

    sigma2 = (
        math.sqrt(64.0 * alpha * math.log(2.5 / budget.delta) * D**2 / delta_c)
        / budget.epsilon
    )
    H = cfg.noise_multiplier * sigma2 * rng.standard_normal(d)
    theta_hat = C.project(theta2 + H)
    info.update(lam=lam, alpha=alpha, sigma1=sigma1, sigma2=sigma2, width=width, delta_c=delta_c)
    return theta_hat, info


def phased_dp_sgd(data, loss, budget, rng, eta=None, noise_multiplier=1.0):
    """Phased one-pass DP-SGD (unconstrained).

    Runs ceil(log2 n) phases on disjoint, geometrically shrinking shards;
    each phase averages its one-pass SGD iterates and perturbs the average
    with Gaussian noise whose scale shrinks 4x per phase.  Returns
    (w_k, info).
    """
    n, d = data.n, data.d
    L, beta = loss.lipschitz, loss.smoothness
    if eta is None:
        eta = (1.0 / L) * min(
            4.0 / math.sqrt(n),
            budget.epsilon / (2.0 * math.sqrt(d * math.log(1.0 / budget.delta))),
        )
    if eta > 1.0 / beta:
        n_min = math.ceil(16.0 * beta**2 / L**2)
        raise RefusalError(
            f"step size {eta:.3g} exceeds 1/beta={1.0 / beta:.3g}; need n >= {n_min} "
            "for the automatic step",
            requirement=n_min,
        )

    k = max(1, math.ceil(math.log2(n)))
    w = np.zeros(d)
    offset = 0
    shards = []
    for i in range(1, k + 1):
        n_i = n >> i  # floor(2^-i * n)
        if n_i == 0:
            shards.append(0)
            continue
        eta_i = eta * 4.0**-i
        shard = data.subset(slice(offset, offset + n_i))
        offset += n_i
        shards.append(n_i)

        avg = w.copy()  # running mean over the n_i + 1 iterates, starts at w_i^1
        cur = w
        for t in range(n_i):
            g = loss.gradient(cur, shard.X[t], None if shard.y is None else shard.y[t])
            cur = cur - eta_i * g
            avg += (cur - avg) / (t + 2.0)
        sigma_i = 4.0 * L * eta_i * math.sqrt(math.log(1.0 / budget.delta)) / budget.epsilon
        w = avg + noise_multiplier * sigma_i * rng.standard_normal(d)

    info = {"eta": eta, "phases": k, "shard_sizes": shards}
    return w, info
