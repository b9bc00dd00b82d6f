"""Experiment configuration: a single strict JSON document.

Unknown keys anywhere in the document are hard errors: a silently ignored
typo in a schedule constant would corrupt an experiment, so the parser
refuses instead.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ConfigError

_TOP_KEYS = {
    "algorithm",
    "loss",
    "distribution",
    "geometry",
    "constraint",
    "n_grid",
    "eps_grid",
    "delta",
    "trials",
    "base_seed",
    "evaluation",
    "solver",
    "parallelism",
}
_GEOMETRY_KEYS = {"p", "d"}
_EVAL_KEYS = {"policy", "m_eval"}
_CONSTRAINT_KEYS = {"set", "radius", "p"}
_SOLVER_KEYS = {
    "alpha_opt",
    "lambda_reg",
    "eta",
    "T",
    "alpha_reg",
    "gamma",
    "lambda_trunc",
    "c_t",
    "c_lambda",
    "c_noise",
    "c_shuffle",
    "c_eps",
    "bypass_regime_check",
    "noise_multiplier",
    "check_release_distance",
}

ALGORITHMS = (
    "app_objp",
    "app_objp_sc",
    "phased_dp_sgd",
    "noisy_reg_md",
    "shuffled_truncated_md",
    "batched_truncated_md",
    "lipschitz_high_p",
)
LOSSES = ("logistic", "mean_point", "pseudo_huber")
DISTRIBUTIONS = ("ball_cloud", "logistic_sphere", "heavy_tail_linear")
CONSTRAINT_SETS = ("l1", "l2", "lp")


def _check_keys(mapping, allowed, where):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


@dataclass
class ExperimentConfig:
    algorithm: str
    loss: dict
    distribution: dict
    geometry: dict
    n_grid: list
    eps_grid: list
    delta: float
    trials: int
    base_seed: int
    constraint: Optional[dict] = None
    evaluation: dict = field(default_factory=lambda: {"policy": "auto", "m_eval": 100_000})
    solver: dict = field(default_factory=dict)
    parallelism: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; known: {ALGORITHMS}")
        if self.loss.get("name") not in LOSSES:
            raise ConfigError(f"unknown loss {self.loss.get('name')!r}; known: {LOSSES}")
        if self.distribution.get("name") not in DISTRIBUTIONS:
            raise ConfigError(
                f"unknown distribution {self.distribution.get('name')!r}; known: {DISTRIBUTIONS}"
            )
        _check_keys(self.geometry, _GEOMETRY_KEYS, "geometry")
        if not self.n_grid or not self.eps_grid:
            raise ConfigError("n_grid and eps_grid must be nonempty")
        if any(int(n) != n or n < 1 for n in self.n_grid):
            raise ConfigError("n_grid must contain positive integers")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must be in (0, 1)")
        if self.constraint is not None:
            _check_keys(self.constraint, _CONSTRAINT_KEYS, "constraint")
            if self.constraint.get("set") not in CONSTRAINT_SETS:
                raise ConfigError(f"unknown constraint set {self.constraint.get('set')!r}")
        _check_keys(self.evaluation, _EVAL_KEYS, "evaluation")
        if self.evaluation.get("policy") not in ("auto", "oracle", "mc"):
            raise ConfigError("evaluation.policy must be auto|oracle|mc")
        _check_keys(self.solver, _SOLVER_KEYS, "solver")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
        _check_keys(doc, _TOP_KEYS, "config")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(f"missing required config keys: {exc}") from exc

    @classmethod
    def from_json(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "loss": self.loss,
            "distribution": self.distribution,
            "geometry": self.geometry,
            "constraint": self.constraint,
            "n_grid": list(self.n_grid),
            "eps_grid": list(self.eps_grid),
            "delta": self.delta,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "evaluation": self.evaluation,
            "solver": self.solver,
            "parallelism": self.parallelism,
        }
