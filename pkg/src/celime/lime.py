"""Cost-effective local surrogate explanations.

An event ``x`` is explained by fitting the cost-weighted elastic net to the
black box's probabilities on Gaussian perturbations of ``x``, each
perturbation weighted by an exponential locality kernel. Passing unit costs
(or ``penalize_costs=False``) gives the plain LIME baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import solver
from .blackbox import BlackBoxModel, predict_proba


@dataclass(frozen=True)
class FeatureStats:
    """Training-set column statistics used to scale perturbations."""

    mean: np.ndarray
    std: np.ndarray
    boolean: np.ndarray

    @classmethod
    def from_data(cls, X) -> "FeatureStats":
        X = solver.check_design(X)
        boolean = np.all((X == 0) | (X == 1), axis=0)
        return cls(mean=X.mean(axis=0), std=X.std(axis=0), boolean=boolean)


@dataclass(frozen=True)
class PerturbationConfig:
    n_samples: int = 5000
    kernel_width: float | None = None  # None -> 0.75 * sqrt(p)
    noise_scale: float = 1.0
    boolean_resample_prob: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 10:
            raise ValueError("n_samples must be >= 10")
        if self.kernel_width is not None and not self.kernel_width > 0:
            raise ValueError("kernel_width must be > 0")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be >= 0")
        if not 0.0 <= self.boolean_resample_prob <= 1.0:
            raise ValueError("boolean_resample_prob must lie in [0, 1]")

    def width_for(self, p: int) -> float:
        return self.kernel_width if self.kernel_width is not None else 0.75 * np.sqrt(p)


@dataclass
class Explanation:
    event_index: int
    weights: np.ndarray
    intercept: float
    local_fidelity: float
    total_cost_of_nonzero: float
    costs: np.ndarray
    converged: bool = True

    def to_record(self, feature_names=None) -> dict:
        names = feature_names or [f"f{j}" for j in range(len(self.weights))]
        return {
            "event_index": int(self.event_index),
            "intercept": float(self.intercept),
            "local_fidelity": float(self.local_fidelity),
            "total_cost_of_nonzero": float(self.total_cost_of_nonzero),
            "converged": bool(self.converged),
            "features": [
                {"name": str(nm), "weight": float(wt), "cost": float(c)}
                for nm, wt, c in zip(names, self.weights, self.costs)
            ],
        }


def sample_perturbations(x, stats: FeatureStats, cfg: PerturbationConfig,
                         rng: np.random.Generator | None = None) -> np.ndarray:
    """Draw ``cfg.n_samples`` perturbations of ``x``; row 0 is ``x`` itself.

    Continuous features get independent ``N(0, (noise_scale * std_j)^2)``
    noise. Boolean features are instead resampled from their training
    marginal with probability ``boolean_resample_prob`` per entry. A
    ``noise_scale`` of 0 switches perturbation off entirely.
    """
    x = np.asarray(x, dtype=float)
    p = x.shape[0]
    if stats.std.shape != (p,):
        raise ValueError("feature stats do not match the event's length")
    if np.any(~np.isfinite(stats.std)) or np.any(stats.std < 0):
        raise ValueError("feature stds must be finite and nonnegative")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    n = cfg.n_samples
    Z = np.tile(x, (n, 1))
    if cfg.noise_scale == 0:
        return Z
    cont = ~stats.boolean
    noise = rng.standard_normal((n, p))
    Z[:, cont] += noise[:, cont] * (cfg.noise_scale * stats.std[cont])
    if np.any(stats.boolean):
        flip = rng.random((n, p)) < cfg.boolean_resample_prob
        draw = (rng.random((n, p)) < stats.mean).astype(float)
        mask = flip & stats.boolean
        Z[mask] = draw[mask]
    Z[0] = x
    return Z


def kernel_weights(x, Z, width: float, scale=None) -> np.ndarray:
    """Exponential kernel ``exp(-d^2 / width^2)`` on scaled Euclidean distance.

    ``scale`` holds per-feature divisors (typically training stds); features
    with zero scale do not contribute to the distance.
    """
    if not width > 0:
        raise ValueError("kernel width must be positive")
    x = np.asarray(x, dtype=float)
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    diff = Z - x
    if scale is not None:
        scale = np.asarray(scale, dtype=float)
        inv = np.divide(1.0, scale, out=np.zeros_like(scale), where=scale > 0)
        diff = diff * inv
    d2 = np.einsum("ij,ij->i", diff, diff)
    return np.exp(-d2 / width**2)


def weighted_r2(target, fitted, w) -> float:
    mean = (w @ target) / w.sum()
    ss_tot = w @ (target - mean) ** 2
    ss_res = w @ (target - fitted) ** 2
    if ss_tot <= 1e-300:
        return 1.0 if ss_res <= 1e-300 else 0.0
    return float(1.0 - ss_res / ss_tot)


def explain(model: BlackBoxModel, x, costs, stats: FeatureStats,
            solver_cfg: solver.SolverConfig | None = None,
            pert_cfg: PerturbationConfig | None = None,
            event_index: int = 0, penalize_costs: bool = True) -> Explanation:
    """Explain the black box's probability at ``x``.

    The perturbation RNG is seeded from ``(pert_cfg.seed, event_index)`` so
    events can be explained in any order, or concurrently, with identical
    results. With ``penalize_costs=False`` the surrogate is fit with unit
    costs while ``costs`` is still used for the cost bookkeeping.
    """
    solver_cfg = solver_cfg or solver.SolverConfig()
    pert_cfg = pert_cfg or PerturbationConfig()
    x = np.asarray(x, dtype=float)
    p = x.shape[0]
    if model.n_features != p:
        raise ValueError(f"model expects {model.n_features} features, got {p}")
    costs = solver.check_costs(costs, p)
    rng = np.random.default_rng([pert_cfg.seed, event_index])
    Z = sample_perturbations(x, stats, pert_cfg, rng=rng)
    target = predict_proba(model, Z)
    kw = kernel_weights(x, Z, pert_cfg.width_for(p), scale=stats.std)
    fit_costs = costs if penalize_costs else np.ones(p)
    coef = solver.fit(Z, target, fit_costs, solver_cfg.with_weights(kw))
    fidelity = weighted_r2(target, Z @ coef.beta + coef.intercept, kw)
    nonzero = coef.beta != 0
    return Explanation(
        event_index=int(event_index),
        weights=coef.beta,
        intercept=coef.intercept,
        local_fidelity=fidelity,
        total_cost_of_nonzero=float(costs[nonzero].sum()),
        costs=costs,
        converged=coef.converged,
    )
