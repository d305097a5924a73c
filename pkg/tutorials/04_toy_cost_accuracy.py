"""Cost against accuracy on the toy problem, for all four orderings.

A few trials run in a minute or two; pass a trial count to run more, e.g.
``python tutorials/04_toy_cost_accuracy.py 100``.
"""

# %%
import sys

import numpy as np

from celime import evaluation
from celime.evaluation import ALL_METHODS, EvalConfig

n_trials = int(sys.argv[1]) if len(sys.argv) > 1 else 5
res = evaluation.run_toy_experiment(n_trials, ALL_METHODS, EvalConfig(), root_seed=0)
print("completed trials", len(res.trial_ids), "failures", res.failures)

# %% one trial's curve: revealing features in order, unrevealed ones at training means
c = res.curves[evaluation.MethodId.CE_LIME][0]
for k in (0, 1, 2, 5, 10, 20, 80):
    print(f"k={k:2d} cost={c.cost[k]:7.2f} accuracy={c.accuracy[k]:.3f}")

# %% survivor-only mean cost to reach each accuracy level
levels = (0.6, 0.7, 0.8, 0.9)
print("method      " + "".join(f"{lv:>16}" for lv in levels))
for agg in res.aggregates(levels):
    cells = "".join(
        f"{m:8.2f}±{s:4.2f}({n:2d})" if n else f"{'-':>16}"
        for m, s, n in zip(agg.mean_cost, agg.stderr, agg.survivors))
    print(f"{agg.method.value:<12}{cells}")

# %% the same data as CSV, as the command-line tool writes it
print(evaluation.aggregate_csv(res.aggregates(levels)).splitlines()[:3])
np.testing.assert_array_equal(  # full reveal is the same model on the same data
    [cs[0].accuracy[-1] for cs in res.curves.values()],
    [res.curves[ALL_METHODS[0]][0].accuracy[-1]] * len(ALL_METHODS))
