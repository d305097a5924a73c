"""Global feature ordering from many local explanations (submodular pick).

Rows of the explanation matrix are local surrogate weights. Feature
importance aggregates their magnitudes, greedy coverage picks a
representative set of events, and sorting importance gives the total feature
order whose prefixes are the selected feature subsets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lime

NONZERO_TOL = 1e-8


@dataclass(frozen=True)
class ExplanationMatrix:
    W: np.ndarray
    event_indices: np.ndarray
    converged: np.ndarray | None = None

    def __post_init__(self):
        if self.W.ndim != 2 or self.W.shape[0] != len(self.event_indices):
            raise ValueError("W must have one row per explained event")
        if not np.all(np.isfinite(self.W)):
            raise ValueError("explanation weights must be finite")


def explanation_matrix(model, X_subset, costs, stats, solver_cfg=None,
                       pert_cfg=None, event_indices=None,
                       penalize_costs: bool = True) -> ExplanationMatrix:
    """Explain each row of ``X_subset`` and stack the weights.

    ``event_indices`` label the rows (and seed their perturbations); they
    default to ``0..m-1``.
    """
    X_subset = np.atleast_2d(np.asarray(X_subset, dtype=float))
    m = X_subset.shape[0]
    if m < 1:
        raise ValueError("need at least one event to explain")
    if event_indices is None:
        event_indices = np.arange(m)
    event_indices = np.asarray(event_indices, dtype=int)
    rows, conv = [], []
    for x, idx in zip(X_subset, event_indices):
        e = lime.explain(model, x, costs, stats, solver_cfg, pert_cfg,
                         event_index=int(idx), penalize_costs=penalize_costs)
        rows.append(e.weights)
        conv.append(e.converged)
    return ExplanationMatrix(W=np.vstack(rows), event_indices=event_indices,
                             converged=np.array(conv))


def importance_vector(W, costs=None) -> np.ndarray:
    """``I_j = sqrt(sum_i |W_ij|)``; divided by ``costs`` when given."""
    W = W.W if isinstance(W, ExplanationMatrix) else np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] == 0:
        raise ValueError("W must be a nonempty 2-D matrix")
    imp = np.sqrt(np.abs(W).sum(axis=0))
    if costs is not None:
        imp = imp / np.asarray(costs, dtype=float)
    return imp


def coverage(W, importance, selected) -> float:
    W = W.W if isinstance(W, ExplanationMatrix) else np.asarray(W, dtype=float)
    selected = list(selected)
    if not selected:
        return 0.0
    hit = np.any(np.abs(W[selected]) > NONZERO_TOL, axis=0)
    return float(np.asarray(importance)[hit].sum())


def greedy_pick(W, importance, budget: int, return_gains: bool = False):
    """Greedily maximize importance-weighted feature coverage.

    Returns ``min(budget, n_events)`` row positions into ``W`` in pick
    order. Ties go to the lowest row. With ``return_gains`` the marginal
    gain of each pick is returned as well.
    """
    W = W.W if isinstance(W, ExplanationMatrix) else np.asarray(W, dtype=float)
    importance = np.asarray(importance, dtype=float)
    if budget < 1:
        raise ValueError("budget must be positive")
    n = W.shape[0]
    hits = np.abs(W) > NONZERO_TOL
    covered = np.zeros(W.shape[1], dtype=bool)
    available = np.ones(n, dtype=bool)
    chosen, gains = [], []
    for _ in range(min(budget, n)):
        marginal = (hits & ~covered) @ importance
        marginal[~available] = -np.inf
        best = int(np.argmax(marginal))  # first maximum -> lowest index
        chosen.append(best)
        gains.append(float(marginal[best]))
        available[best] = False
        covered |= hits[best]
    if return_gains:
        return chosen, gains
    return chosen


def feature_ordering(importance) -> np.ndarray:
    """Features by descending importance, ties broken by lowest index."""
    importance = np.asarray(importance, dtype=float)
    return np.argsort(-importance, kind="stable")


def ordering_record(importance, order, costs, feature_names=None,
                    picked_events=None) -> dict:
    names = feature_names or [f"f{j}" for j in range(len(importance))]
    rec = {
        "order": [
            {"rank": r, "index": int(j), "name": str(names[j]),
             "importance": float(importance[j]), "cost": float(costs[j])}
            for r, j in enumerate(order)
        ],
    }
    if picked_events is not None:
        rec["picked_events"] = [int(i) for i in picked_events]
    return rec
