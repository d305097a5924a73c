"""JSON run configuration shared by the command-line tools.

Every section is optional; missing keys take library defaults. Example::

    {
      "seed": 0,
      "jobs": 1,
      "toy": {"n": 1000, "p": 80, "n_informative": 20, "n_linear_combo": 20,
              "n_duplicate": 20, "label_flip_prob": 0.01, "class_sep": 1.0},
      "solver": {"lam": 1.0, "alpha": 0.5, "tolerance": 1e-7,
                 "max_sweeps": 10000, "standardize": true},
      "perturbation": {"n_samples": 5000, "kernel_width": null,
                       "noise_scale": 1.0, "boolean_resample_prob": 0.1},
      "eval": {"train_fraction": 0.8, "n_explain": 50, "blackbox_l2": 1.0,
               "importance_by_cost": false, "n_trials": 100, "methods": "all",
               "levels": [0.5, 0.6, 0.7, 0.8, 0.9], "cost_low": 0.0,
               "cost_high": 10.0}
    }

Unknown keys are rejected so that typos do not silently fall back to
defaults.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import evaluation
from .datagen import ToySpec
from .lime import PerturbationConfig
from .solver import SolverConfig

_SOLVER_KEYS = {"lam", "alpha", "tolerance", "max_sweeps", "standardize", "fit_intercept"}
_PERT_KEYS = {"n_samples", "kernel_width", "noise_scale", "boolean_resample_prob"}
_TOY_KEYS = {f.name for f in dataclasses.fields(ToySpec)} - {"seed"}
_EVAL_KEYS = {"train_fraction", "n_explain", "blackbox_l2", "importance_by_cost",
              "n_trials", "methods", "levels", "cost_low", "cost_high"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    jobs: int = 1
    toy: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    perturbation: dict = field(default_factory=dict)
    eval: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        allowed = {"seed", "jobs", "toy", "solver", "perturbation", "eval"}
        extra = set(raw) - allowed
        if extra:
            raise ConfigError(f"unknown config sections: {sorted(extra)}")
        cfg = cls(
            seed=int(raw.get("seed", 0)),
            jobs=int(raw.get("jobs", 1)),
            toy=dict(raw.get("toy", {})),
            solver=dict(raw.get("solver", {})),
            perturbation=dict(raw.get("perturbation", {})),
            eval=dict(raw.get("eval", {})),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path=None) -> "RunConfig":
        if path is None:
            return cls()
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        return cls.from_dict(raw)

    def validate(self) -> None:
        """Build every component config once so invalid values fail early."""
        for name, section, keys in (
            ("toy", self.toy, _TOY_KEYS),
            ("solver", self.solver, _SOLVER_KEYS),
            ("perturbation", self.perturbation, _PERT_KEYS),
            ("eval", self.eval, _EVAL_KEYS),
        ):
            extra = set(section) - keys
            if extra:
                raise ConfigError(f"unknown keys in [{name}]: {sorted(extra)}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        try:
            self.toy_spec()
            self.eval_config()
            evaluation.parse_methods(self.eval.get("methods", "all"))
            lo, hi = self.cost_range()
            if not 0 <= lo < hi:
                raise ValueError("need 0 <= cost_low < cost_high")
            if int(self.eval.get("n_trials", 100)) < 1:
                raise ValueError("n_trials must be >= 1")
            for lv in self.levels():
                if not 0 <= lv <= 1:
                    raise ValueError("accuracy levels must lie in [0, 1]")
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def toy_spec(self, seed: int | None = None) -> ToySpec:
        return ToySpec(**self.toy, seed=self.seed if seed is None else seed)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(**self.solver)

    def perturbation_config(self, seed: int = 0) -> PerturbationConfig:
        return PerturbationConfig(**self.perturbation, seed=seed)

    def eval_config(self) -> evaluation.EvalConfig:
        e = self.eval
        return evaluation.EvalConfig(
            train_fraction=float(e.get("train_fraction", 0.8)),
            n_explain=int(e.get("n_explain", 50)),
            blackbox_l2=float(e.get("blackbox_l2", 1.0)),
            importance_by_cost=bool(e.get("importance_by_cost", False)),
            solver=self.solver_config(),
            perturbation=self.perturbation_config(),
        )

    def levels(self):
        return tuple(float(v) for v in self.eval.get("levels", evaluation.DEFAULT_LEVELS))

    def cost_range(self):
        return float(self.eval.get("cost_low", 0.0)), float(self.eval.get("cost_high", 10.0))
