"""Command-line interface: ``celime <subcommand> ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure.

Randomness flows from ``--seed``. ``gen-toy`` uses it directly as the toy
seed; ``explain`` and ``pick`` seed perturbations with
``derive_seed(seed, "perturb")``; ``evaluate`` derives per-trial dataset,
cost and trial seeds as documented in :mod:`celime.evaluation`.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import blackbox, datagen, evaluation, ingest, lime, pick
from ._fileio import atomic_write_text
from .config import ConfigError, RunConfig

log = logging.getLogger("celime")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--seed", type=int, help="root seed (overrides config)")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lam", type=float, help="penalty strength lambda")
    p.add_argument("--alpha", type=float, help="L2 share of the penalty, in [0, 1]")
    p.add_argument("--n-samples", type=int, help="perturbations per explanation")
    p.add_argument("--kernel-width", type=float)


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("data", help="event CSV")
    p.add_argument("--schema", help="column-role JSON (default: <data>.schema.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="celime", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-toy", help="write a synthetic dataset CSV")
    _add_common(g)
    g.add_argument("--out", required=True, help="output CSV path")
    g.add_argument("--costs-out", help="also write sampled feature costs here")
    for name in ("n", "p", "n-informative", "n-linear-combo", "n-duplicate", "n-noise"):
        g.add_argument(f"--{name}", type=int)
    g.add_argument("--label-flip-prob", type=float)
    g.add_argument("--class-sep", type=float)

    e = sub.add_parser("explain", help="explain one event, JSON to stdout")
    _add_data_flags(e)
    _add_common(e)
    _add_solver_flags(e)
    e.add_argument("--costs", required=True, help="feature,cost CSV")
    e.add_argument("--event", type=int, required=True, help="row index of the event")
    e.add_argument("--trigger", help="outcome column the black box learns (default: first)")
    e.add_argument("--unit-costs", action="store_true",
                   help="fit the surrogate with unit costs (plain LIME)")

    k = sub.add_parser("pick", help="global feature ordering and submodular pick")
    _add_data_flags(k)
    _add_common(k)
    _add_solver_flags(k)
    k.add_argument("--costs", required=True)
    k.add_argument("--trigger")
    k.add_argument("--n-events", type=int, default=50, help="events to explain")
    k.add_argument("--budget", type=int, default=5, help="events to pick")
    k.add_argument("--unit-costs", action="store_true")
    k.add_argument("--importance-by-cost", action="store_true",
                   help="divide importance by feature cost")
    k.add_argument("--out", help="write JSON here instead of stdout")

    v = sub.add_parser("evaluate", help="cost-vs-accuracy experiment")
    v.add_argument("data", nargs="?", help="event CSV (omit with --toy)")
    v.add_argument("--schema")
    v.add_argument("--toy", action="store_true", help="fresh toy dataset per trial")
    _add_common(v)
    _add_solver_flags(v)
    v.add_argument("--triggers", help="comma-separated outcome columns (default: all)")
    v.add_argument("--methods", help="'all' or comma list of CE_LIME,LIME,GLOBAL,CE_GLOBAL")
    v.add_argument("--trials", type=int)
    v.add_argument("--jobs", type=int)
    v.add_argument("--n-explain", type=int)
    v.add_argument("--out-dir", required=True)

    o = sub.add_parser("overlap", help="trigger overlap matrices")
    _add_data_flags(o)
    o.add_argument("--mode", choices=("jaccard", "conditional"), default="jaccard")
    o.add_argument("--rules", help="JSON object mapping keyword -> category")
    o.add_argument("--out-dir", required=True)
    return parser


def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(getattr(args, "config", None))
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    for flag, key in (("lam", "lam"), ("alpha", "alpha")):
        if getattr(args, flag, None) is not None:
            cfg.solver[key] = getattr(args, flag)
    for flag, key in (("n_samples", "n_samples"), ("kernel_width", "kernel_width")):
        if getattr(args, flag, None) is not None:
            cfg.perturbation[key] = getattr(args, flag)
    for flag, key in (("trials", "n_trials"), ("methods", "methods"), ("n_explain", "n_explain")):
        if getattr(args, flag, None) is not None:
            cfg.eval[key] = getattr(args, flag)
    if getattr(args, "jobs", None) is not None:
        cfg.jobs = args.jobs
    if args.command == "gen-toy":
        for key in ("n", "p", "n_informative", "n_linear_combo", "n_duplicate", "n_noise",
                    "label_flip_prob", "class_sep"):
            if getattr(args, key, None) is not None:
                cfg.toy[key] = getattr(args, key)
    cfg.validate()
    return cfg


def _load_data(args) -> ingest.TriggerDataset:
    schema_file = args.schema or datagen.schema_path(args.data)
    if not Path(schema_file).exists():
        raise ingest.DataError(f"schema file not found: {schema_file}")
    ds = ingest.load_csv(args.data, ingest.read_schema(schema_file))
    if ds.report.rows_dropped:
        log.warning("dropped %d unparseable rows from %s", ds.report.rows_dropped, args.data)
    return ds


def _target(ds: ingest.TriggerDataset, trigger) -> datagen.Dataset:
    return ds.target(trigger if trigger is not None else 0)


def _train_full(dataset: datagen.Dataset, cfg: RunConfig):
    ec = cfg.eval_config()
    try:
        model = blackbox.train(dataset.X, dataset.y, l2=ec.blackbox_l2, seed=cfg.seed)
    except ValueError as exc:
        raise ingest.DataError(str(exc)) from None
    return model, lime.FeatureStats.from_data(dataset.X), ec


def cmd_gen_toy(args) -> int:
    cfg = _load_config(args)
    spec = cfg.toy_spec()
    ds = datagen.generate_toy(spec)
    datagen.export_csv(ds, args.out)
    if args.costs_out:
        lo, hi = cfg.cost_range()
        costs = datagen.sample_costs(ds.p, lo, hi, seed=evaluation.derive_seed(cfg.seed, "costs"))
        datagen.write_costs(args.costs_out, costs, ds.feature_names)
    log.info("wrote %d x %d toy dataset to %s", ds.n, ds.p, args.out)
    return EXIT_OK


def cmd_explain(args) -> int:
    cfg = _load_config(args)
    tds = _load_data(args)
    dataset = _target(tds, args.trigger)
    if not 0 <= args.event < dataset.n:
        raise UsageError(f"event index {args.event} out of range [0, {dataset.n})")
    costs = _read_costs(args.costs, dataset.feature_names)
    model, stats, ec = _train_full(dataset, cfg)
    pert = cfg.perturbation_config(seed=evaluation.derive_seed(cfg.seed, "perturb"))
    exp = lime.explain(model, dataset.X[args.event], costs, stats, ec.solver, pert,
                       event_index=args.event, penalize_costs=not args.unit_costs)
    rec = exp.to_record(dataset.feature_names)
    rec["unit_costs"] = bool(args.unit_costs)
    sys.stdout.write(json.dumps(rec, indent=2) + "\n")
    if not exp.converged:
        raise NumericalFailure("surrogate fit did not converge")
    return EXIT_OK


def _read_costs(path, names):
    try:
        costs = datagen.read_costs(path, names)
    except (OSError, KeyError, ValueError) as exc:
        raise ingest.DataError(f"cannot read costs from {path}: {exc}") from None
    if np.any(costs <= 0) or not np.all(np.isfinite(costs)):
        raise ingest.DataError("costs must be strictly positive and finite")
    return costs


def cmd_pick(args) -> int:
    cfg = _load_config(args)
    tds = _load_data(args)
    dataset = _target(tds, args.trigger)
    costs = _read_costs(args.costs, dataset.feature_names)
    if args.n_events < 1 or args.budget < 1:
        raise UsageError("--n-events and --budget must be positive")
    model, stats, ec = _train_full(dataset, cfg)
    rng = np.random.default_rng(evaluation.derive_seed(cfg.seed, "explain-sample"))
    m = min(args.n_events, dataset.n)
    rows = np.sort(rng.choice(dataset.n, size=m, replace=False))
    pert = cfg.perturbation_config(seed=evaluation.derive_seed(cfg.seed, "perturb"))
    W = pick.explanation_matrix(model, dataset.X[rows], costs, stats, ec.solver, pert,
                                event_indices=rows, penalize_costs=not args.unit_costs)
    imp = pick.importance_vector(W, costs if args.importance_by_cost else None)
    order = pick.feature_ordering(imp)
    chosen = pick.greedy_pick(W, pick.importance_vector(W), min(args.budget, m))
    rec = pick.ordering_record(imp, order, costs, dataset.feature_names,
                               picked_events=rows[chosen])
    rec["explained_events"] = [int(r) for r in rows]
    text = json.dumps(rec, indent=2) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if not np.all(W.converged):
        raise NumericalFailure(f"{int(np.sum(~W.converged))} surrogate fits did not converge")
    return EXIT_OK


def _write_experiment(res: evaluation.ExperimentResult, out_dir: Path, suffix: str,
                      levels) -> None:
    curves, ids = [], []
    for cs in res.curves.values():
        curves.extend(cs)
        ids.extend(res.trial_ids)
    atomic_write_text(out_dir / f"curves{suffix}.csv", evaluation.curves_csv(curves, ids))
    atomic_write_text(out_dir / f"aggregate{suffix}.csv",
                      evaluation.aggregate_csv(res.aggregates(levels)))


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    if args.toy == bool(args.data):
        raise UsageError("give either a data CSV or --toy")
    ec = cfg.eval_config()
    methods = evaluation.parse_methods(cfg.eval.get("methods", "all"))
    n_trials = int(cfg.eval.get("n_trials", 100))
    levels = cfg.levels()
    out_dir = Path(args.out_dir)
    summary = {"seed": cfg.seed, "n_trials": n_trials,
               "methods": [m.value for m in methods], "runs": []}
    ok_runs = 0
    if args.toy:
        res = evaluation.run_toy_experiment(n_trials, methods, ec, cfg.toy_spec(),
                                            root_seed=cfg.seed, jobs=cfg.jobs,
                                            cost_range=cfg.cost_range())
        runs = [("toy", "", res)]
    else:
        tds = _load_data(args)
        names = tds.trigger_names
        if args.triggers:
            names = [t.strip() for t in args.triggers.split(",") if t.strip()]
        runs = []
        for t in names:
            ds = tds.target(t)
            if ds.y.min() == ds.y.max():
                log.warning("trigger %s has a single class; skipped", t)
                summary["runs"].append({"target": t, "skipped": "single class"})
                continue
            res = evaluation.run_dataset_experiment(
                ds, n_trials, methods, ec, root_seed=cfg.seed, jobs=cfg.jobs,
                cost_range=cfg.cost_range())
            runs.append((t, f"_{t}", res))
    for target, suffix, res in runs:
        if res.trial_ids:
            _write_experiment(res, out_dir, suffix, levels)
            ok_runs += 1
        flags = sorted({f for cs in res.curves.values() for c in cs for f in c.flags})
        summary["runs"].append({
            "target": target,
            "completed_trials": len(res.trial_ids),
            "failures": [{"trial": t, "error": msg} for t, msg in res.failures],
            "flags": flags,
        })
    atomic_write_text(out_dir / "summary.json", json.dumps(summary, indent=2) + "\n")
    if ok_runs == 0:
        raise NumericalFailure("no trial completed")
    return EXIT_OK


def cmd_overlap(args) -> int:
    tds = _load_data(args)
    out_dir = Path(args.out_dir)
    om = ingest.overlap_matrix(tds.trigger_outcomes, tds.trigger_names, mode=args.mode)
    atomic_write_text(out_dir / "overlap.csv", om.to_csv_text())
    if om.inactive.any():
        log.warning("triggers never firing: %s",
                    [n for n, z in zip(om.labels, om.inactive) if z])
    if args.rules:
        try:
            rules = json.loads(Path(args.rules).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read rules file: {exc}") from None
        if not isinstance(rules, dict) or not rules:
            raise UsageError("rules must be a nonempty JSON object")
        assignment, _, cm = ingest.group_categories(tds.trigger_names, tds.trigger_outcomes,
                                                    rules, mode=args.mode)
        atomic_write_text(out_dir / "overlap_categories.csv", cm.to_csv_text())
        atomic_write_text(out_dir / "categories.json", json.dumps(assignment, indent=2) + "\n")
    return EXIT_OK


COMMANDS = {
    "gen-toy": cmd_gen_toy,
    "explain": cmd_explain,
    "pick": cmd_pick,
    "evaluate": cmd_evaluate,
    "overlap": cmd_overlap,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"celime: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ingest.DataError as exc:
        print(f"celime: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalFailure as exc:
        print(f"celime: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
