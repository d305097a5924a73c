"""L2-regularized logistic regression used as the classifier being explained.

Downstream code touches the model only through :func:`predict_proba`, so it
stays opaque to the explainers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .solver import check_design


@dataclass(frozen=True)
class BlackBoxModel:
    weights: np.ndarray
    intercept: float
    l2: float = 1.0
    iterations: int = 0
    final_loss: float = float("nan")
    seed: int = 0

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def to_dict(self) -> dict:
        return {
            "kind": "logistic_l2",
            "weights": [float(v) for v in self.weights],
            "intercept": float(self.intercept),
            "meta": {
                "l2": self.l2,
                "iterations": self.iterations,
                "final_loss": self.final_loss,
                "seed": self.seed,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BlackBoxModel":
        meta = d.get("meta", {})
        return cls(
            weights=np.asarray(d["weights"], dtype=float),
            intercept=float(d["intercept"]),
            l2=float(meta.get("l2", 1.0)),
            iterations=int(meta.get("iterations", 0)),
            final_loss=float(meta.get("final_loss", float("nan"))),
            seed=int(meta.get("seed", 0)),
        )


def save_model(model: BlackBoxModel, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


def load_model(path) -> BlackBoxModel:
    return BlackBoxModel.from_dict(json.loads(Path(path).read_text()))


def sigmoid(t):
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _log1pexp(t):
    return np.logaddexp(0.0, t)


def loss_and_grad(params, X, y, l2: float):
    """Regularized negative log-likelihood and its gradient.

    ``params`` is ``[weights..., intercept]``. The loss is the mean log-loss
    ``mean_i log(1 + exp(-s_i m_i)) + l2/2 * ||weights||^2`` with margins
    ``m = X w + b`` and signs ``s = 2y - 1``; the intercept is unpenalized.
    Averaging keeps ``l2`` meaningful independently of the row count.
    """
    n = X.shape[0]
    w, b = params[:-1], params[-1]
    m = X @ w + b
    loss = float(np.mean(_log1pexp(m) - y * m) + 0.5 * l2 * (w @ w))
    resid = (sigmoid(m) - y) / n
    grad = np.empty_like(params)
    grad[:-1] = X.T @ resid + l2 * w
    grad[-1] = resid.sum()
    return loss, grad


def train(X, y, l2: float = 1.0, seed: int = 0, tol: float = 1e-6,
          max_iter: int = 200) -> BlackBoxModel:
    """Fit by damped Newton iterations from the origin.

    Stops when the gradient infinity-norm drops below ``tol``. The procedure
    draws no random numbers; ``seed`` is recorded in the metadata only.
    """
    X = check_design(X)
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise ValueError("labels must have one entry per row")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0/1")
    if y.min() == y.max():
        raise ValueError("both classes must be present to train")
    if l2 < 0:
        raise ValueError("l2 must be nonnegative")
    y = y.astype(float)
    n, p = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    reg = np.full(p + 1, l2)
    reg[-1] = 0.0
    params = np.zeros(p + 1)
    loss, grad = loss_and_grad(params, X, y, l2)
    it = 0
    for it in range(1, max_iter + 1):
        if np.max(np.abs(grad)) < tol:
            it -= 1
            break
        prob = sigmoid(Xa @ params)
        h = prob * (1.0 - prob) / n
        hess = (Xa * h[:, None]).T @ Xa + np.diag(reg)
        # tiny ridge keeps the separable, l2=0 case solvable
        hess[np.diag_indices_from(hess)] += 1e-12
        step = np.linalg.solve(hess, grad)
        t = 1.0
        while True:
            cand = params - t * step
            cand_loss, cand_grad = loss_and_grad(cand, X, y, l2)
            if cand_loss <= loss - 1e-4 * t * (grad @ step) or t < 1e-10:
                break
            t *= 0.5
        params, loss, grad = cand, cand_loss, cand_grad
    return BlackBoxModel(
        weights=params[:-1].copy(),
        intercept=float(params[-1]),
        l2=float(l2),
        iterations=it,
        final_loss=loss,
        seed=int(seed),
    )


def predict_proba(model: BlackBoxModel, X) -> np.ndarray:
    X = check_design(X)
    if X.shape[1] != model.n_features:
        raise ValueError(
            f"model expects {model.n_features} features, got {X.shape[1]}"
        )
    return sigmoid(X @ model.weights + model.intercept)


def predict_label(model: BlackBoxModel, X, threshold: float = 0.5) -> np.ndarray:
    return (predict_proba(model, X) >= threshold).astype(int)
