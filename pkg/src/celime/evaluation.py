"""Cost-versus-accuracy experiments.

Each trial splits the data, trains the black box, derives a feature ordering
with one of four methods, then reveals features in that order (unrevealed
ones held at their training means) and records accuracy against cumulative
cost. Trials are aggregated per accuracy level over the trials that reach
it.

Seeds: every random choice in a trial derives from the trial seed through
:func:`derive_seed` with a fixed tag (``"split"``, ``"explain-sample"``,
``"perturb"``); experiment runners derive per-trial dataset, cost and trial
seeds from one root seed the same way.
"""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import blackbox, datagen, lime, pick, solver
from ._fileio import format_float

log = logging.getLogger(__name__)

DEFAULT_LEVELS = tuple(np.round(np.arange(0.50, 0.96, 0.05), 2))


class MethodId(str, enum.Enum):
    CE_LIME = "CE_LIME"
    LIME = "LIME"
    GLOBAL = "GLOBAL"
    CE_GLOBAL = "CE_GLOBAL"


ALL_METHODS = tuple(MethodId)


def parse_methods(text) -> list:
    if isinstance(text, str):
        if text.strip().lower() == "all":
            return list(ALL_METHODS)
        text = [t for t in text.split(",") if t.strip()]
    return [MethodId(str(t).strip().upper()) for t in text]


def derive_seed(seed: int, *tags) -> int:
    key = [int(seed)] + [t if isinstance(t, int) else _tag_int(t) for t in tags]
    return int(np.random.SeedSequence(key).generate_state(1, dtype=np.uint32)[0])


def _tag_int(tag: str) -> int:
    # stable across processes, unlike hash()
    return int.from_bytes(tag.encode("utf-8"), "little") % (2**32)


@dataclass(frozen=True)
class EvalConfig:
    train_fraction: float = 0.8
    n_explain: int = 50
    blackbox_l2: float = 1.0
    solver: solver.SolverConfig = field(
        default_factory=lambda: solver.SolverConfig(lam=1.0, alpha=0.5))
    perturbation: lime.PerturbationConfig = field(default_factory=lime.PerturbationConfig)
    importance_by_cost: bool = False

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.n_explain < 1:
            raise ValueError("n_explain must be positive")
        if self.blackbox_l2 < 0:
            raise ValueError("blackbox_l2 must be nonnegative")


@dataclass
class CostAccuracyCurve:
    k: np.ndarray
    cost: np.ndarray
    accuracy: np.ndarray
    method: MethodId | None = None
    trial_seed: int = 0
    ordering: np.ndarray | None = None
    flags: list = field(default_factory=list)


@dataclass
class AggregateCurve:
    levels: np.ndarray
    mean_cost: np.ndarray  # nan where no trial survives
    stderr: np.ndarray
    survivors: np.ndarray
    method: MethodId | None = None


def stratified_split(y, train_fraction: float, rng: np.random.Generator):
    """Per-class shuffled split; returns sorted (train, eval) row indices."""
    y = np.asarray(y)
    train, test = [], []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = rng.permutation(idx)
        cut = int(round(train_fraction * len(idx)))
        if len(idx) >= 2:
            cut = min(max(cut, 1), len(idx) - 1)
        train.append(idx[:cut])
        test.append(idx[cut:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def incremental_reveal_accuracy(model, eval_X, eval_y, ordering, costs,
                                impute_means) -> CostAccuracyCurve:
    """Accuracy as features are revealed one at a time in ``ordering``.

    Point ``k`` uses true values for the first ``k`` ordered features and
    ``impute_means`` for the rest, so ``k = 0`` is the all-imputed baseline.
    """
    eval_X = np.asarray(eval_X, dtype=float)
    eval_y = np.asarray(eval_y)
    if eval_X.shape[0] == 0:
        raise ValueError("evaluation set is empty")
    p = eval_X.shape[1]
    ordering = np.asarray(ordering, dtype=int)
    if sorted(ordering.tolist()) != list(range(p)):
        raise ValueError("ordering must be a permutation of the feature indices")
    costs = np.asarray(costs, dtype=float)
    Xt = np.tile(np.asarray(impute_means, dtype=float), (eval_X.shape[0], 1))
    acc = np.empty(p + 1)
    acc[0] = np.mean(blackbox.predict_label(model, Xt) == eval_y)
    for k, j in enumerate(ordering, start=1):
        Xt[:, j] = eval_X[:, j]
        acc[k] = np.mean(blackbox.predict_label(model, Xt) == eval_y)
    cum = np.concatenate([[0.0], np.cumsum(costs[ordering])])
    return CostAccuracyCurve(k=np.arange(p + 1), cost=cum, accuracy=acc,
                             ordering=ordering)


@dataclass
class _TrialState:
    model: blackbox.BlackBoxModel
    X_train: np.ndarray
    X_eval: np.ndarray
    y_eval: np.ndarray
    explain_rows: np.ndarray
    stats: lime.FeatureStats


def _prepare(dataset: datagen.Dataset, cfg: EvalConfig, seed: int) -> _TrialState:
    y = np.asarray(dataset.y).astype(int)
    if y.min() == y.max():
        raise ValueError("dataset must contain both classes")
    rng = np.random.default_rng(derive_seed(seed, "split"))
    tr, ev = stratified_split(y, cfg.train_fraction, rng)
    X_train, y_train = dataset.X[tr], y[tr]
    model = blackbox.train(X_train, y_train, l2=cfg.blackbox_l2, seed=seed)
    rng = np.random.default_rng(derive_seed(seed, "explain-sample"))
    m = min(cfg.n_explain, len(tr))
    rows = np.sort(rng.choice(len(tr), size=m, replace=False))
    return _TrialState(model=model, X_train=X_train, X_eval=dataset.X[ev],
                       y_eval=y[ev], explain_rows=rows,
                       stats=lime.FeatureStats.from_data(X_train))


def method_ordering(state: _TrialState, costs, method: MethodId, cfg: EvalConfig,
                    seed: int):
    """Feature ordering for ``method``; returns ``(ordering, flags)``."""
    method = MethodId(method)
    costs = np.asarray(costs, dtype=float)
    p = costs.shape[0]
    flags = []
    if method in (MethodId.CE_LIME, MethodId.LIME):
        pert = replace(cfg.perturbation, seed=derive_seed(seed, "perturb"))
        W = pick.explanation_matrix(
            state.model, state.X_train[state.explain_rows], costs, state.stats,
            cfg.solver, pert, event_indices=state.explain_rows,
            penalize_costs=method is MethodId.CE_LIME)
        if not np.all(W.converged):
            flags.append(f"{int(np.sum(~W.converged))} explanations did not converge")
        imp = pick.importance_vector(W, costs if cfg.importance_by_cost else None)
    else:
        target = blackbox.predict_proba(state.model, state.X_train)
        fit_costs = costs if method is MethodId.CE_GLOBAL else np.ones(p)
        coef = solver.fit(state.X_train, target, fit_costs, cfg.solver)
        if not coef.converged:
            flags.append("global fit did not converge")
        imp = np.abs(coef.beta)
    return pick.feature_ordering(imp), flags


def run_trial(dataset: datagen.Dataset, costs, method, cfg: EvalConfig | None = None,
              seed: int = 0) -> CostAccuracyCurve:
    return run_trial_methods(dataset, costs, [method], cfg, seed)[MethodId(method)]


def run_trial_methods(dataset: datagen.Dataset, costs, methods, cfg: EvalConfig | None = None,
                      seed: int = 0) -> dict:
    """Run several methods on one trial, sharing the split and black box.

    Each method's curve is identical to what :func:`run_trial` gives alone.
    """
    cfg = cfg or EvalConfig()
    costs = solver.check_costs(costs, dataset.X.shape[1])
    state = _prepare(dataset, cfg, seed)
    means = state.X_train.mean(axis=0)
    out = {}
    for method in methods:
        method = MethodId(method)
        order, flags = method_ordering(state, costs, method, cfg, seed)
        curve = incremental_reveal_accuracy(state.model, state.X_eval, state.y_eval,
                                            order, costs, means)
        curve.method = method
        curve.trial_seed = seed
        curve.flags = flags
        out[method] = curve
    return out


def cost_at_accuracy(curve: CostAccuracyCurve, level: float):
    """Cheapest cumulative cost whose accuracy reaches ``level``, else None."""
    if not 0.0 <= level <= 1.0:
        raise ValueError("level must lie in [0, 1]")
    ok = np.asarray(curve.accuracy) >= level - 1e-12
    if not np.any(ok):
        return None
    return float(np.min(np.asarray(curve.cost)[ok]))


def aggregate(curves: Sequence[CostAccuracyCurve], levels=DEFAULT_LEVELS) -> AggregateCurve:
    """Survivor-only mean and standard error of cost at each accuracy level.

    Standard error is the sample standard deviation over survivors divided
    by the square root of their count.
    """
    if not curves:
        raise ValueError("need at least one trial")
    levels = np.asarray(levels, dtype=float)
    mean = np.full(levels.shape, np.nan)
    se = np.full(levels.shape, np.nan)
    surv = np.zeros(levels.shape, dtype=int)
    for i, lv in enumerate(levels):
        vals = [v for v in (cost_at_accuracy(c, lv) for c in curves) if v is not None]
        surv[i] = len(vals)
        if vals:
            mean[i] = np.mean(vals)
            se[i] = np.std(vals, ddof=1) / np.sqrt(len(vals)) if len(vals) > 1 else 0.0
    return AggregateCurve(levels=levels, mean_cost=mean, stderr=se, survivors=surv,
                          method=curves[0].method)


def aggregate_by_features(curves: Sequence[CostAccuracyCurve]):
    """Mean and standard error of cumulative cost at each feature count."""
    costs = np.vstack([c.cost for c in curves])
    n = costs.shape[0]
    se = costs.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros(costs.shape[1])
    return curves[0].k, costs.mean(axis=0), se


def _fmt(v) -> str:
    return "" if v is None or (isinstance(v, float) and np.isnan(v)) else format_float(v)


def curves_csv(curves: Sequence[CostAccuracyCurve], trial_ids=None) -> str:
    lines = ["method,trial,k,cost,accuracy"]
    for i, c in enumerate(curves):
        trial = trial_ids[i] if trial_ids is not None else c.trial_seed
        for k, cost, acc in zip(c.k, c.cost, c.accuracy):
            lines.append(f"{c.method.value},{trial},{int(k)},{_fmt(cost)},{_fmt(acc)}")
    return "\n".join(lines) + "\n"


def aggregate_csv(aggs: Sequence[AggregateCurve]) -> str:
    lines = ["method,level,mean_cost,stderr,survivors"]
    for a in aggs:
        for lv, m, s, n in zip(a.levels, a.mean_cost, a.stderr, a.survivors):
            lines.append(f"{a.method.value},{_fmt(lv)},{_fmt(m)},{_fmt(s)},{int(n)}")
    return "\n".join(lines) + "\n"


@dataclass
class ExperimentResult:
    curves: dict  # MethodId -> list of curves, in trial order
    trial_ids: list
    failures: list  # (trial id, message)

    def aggregates(self, levels=DEFAULT_LEVELS) -> list:
        return [aggregate(cs, levels) for m, cs in self.curves.items() if cs]


def _toy_trial(args):
    t, root_seed, spec, methods, cfg, cost_range = args
    ds = datagen.generate_toy(replace(spec, seed=derive_seed(root_seed, "toy-data", t)))
    costs = datagen.sample_costs(ds.p, *cost_range, seed=derive_seed(root_seed, "costs", t))
    return run_trial_methods(ds, costs, methods, cfg, seed=derive_seed(root_seed, "trial", t))


def _data_trial(args):
    t, root_seed, dataset, methods, cfg, cost_range = args
    costs = datagen.sample_costs(dataset.p, *cost_range,
                                 seed=derive_seed(root_seed, "costs", t))
    return run_trial_methods(dataset, costs, methods, cfg,
                             seed=derive_seed(root_seed, "trial", t))


def _run(fn, jobs_args, methods, jobs: int) -> ExperimentResult:
    methods = [MethodId(m) for m in methods]
    curves = {m: [] for m in methods}
    ids, failures = [], []

    def collect(t, res):
        ids.append(t)
        for m in methods:
            curves[m].append(res[m])

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [(a[0], pool.submit(fn, a)) for a in jobs_args]
            for t, fut in futs:
                try:
                    collect(t, fut.result())
                except Exception as exc:  # a failed trial must not stop the run
                    log.warning("trial %s failed: %s", t, exc)
                    failures.append((t, str(exc)))
    else:
        for a in jobs_args:
            try:
                collect(a[0], fn(a))
            except Exception as exc:
                log.warning("trial %s failed: %s", a[0], exc)
                failures.append((a[0], str(exc)))
    return ExperimentResult(curves=curves, trial_ids=ids, failures=failures)


def run_toy_experiment(n_trials: int, methods=ALL_METHODS, cfg: EvalConfig | None = None,
                       spec: datagen.ToySpec | None = None, root_seed: int = 0,
                       jobs: int = 1, cost_range=(0.0, 10.0)) -> ExperimentResult:
    """Fresh toy problem and fresh costs for every trial."""
    cfg = cfg or EvalConfig()
    spec = spec or datagen.ToySpec()
    args = [(t, root_seed, spec, list(methods), cfg, tuple(cost_range)) for t in range(n_trials)]
    return _run(_toy_trial, args, methods, jobs)


def run_dataset_experiment(dataset: datagen.Dataset, n_trials: int, methods=ALL_METHODS,
                           cfg: EvalConfig | None = None, root_seed: int = 0,
                           jobs: int = 1, cost_range=(0.0, 10.0)) -> ExperimentResult:
    """Fixed dataset, fresh costs and split for every trial."""
    cfg = cfg or EvalConfig()
    args = [(t, root_seed, dataset, list(methods), cfg, tuple(cost_range))
            for t in range(n_trials)]
    return _run(_data_trial, args, methods, jobs)
