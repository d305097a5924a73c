"""Explaining one prediction with and without feature costs.

Run with ``python tutorials/02_explain_one_event.py``.
"""

# %%
import numpy as np

from celime import blackbox, datagen, lime
from celime.solver import SolverConfig

data = datagen.generate_toy(datagen.ToySpec(seed=1))
costs = datagen.sample_costs(data.p, seed=2)
model = blackbox.train(data.X, data.y)  # the black box, only queried through predict_proba
stats = lime.FeatureStats.from_data(data.X)
print("training accuracy", np.mean(blackbox.predict_label(model, data.X) == data.y))

# %% explain event 7 twice: cost-weighted penalty, and unit penalty (plain LIME)
event = 7
pert = lime.PerturbationConfig(n_samples=5000, seed=3)
print(f"{'lam':>6} {'nonzero ce/plain':>17} {'cost of support ce/plain':>25} {'fidelity ce/plain':>18}")
for lam in (1.0, 10.0, 100.0):
    cfg = SolverConfig(lam=lam, alpha=0.5)
    ce = lime.explain(model, data.X[event], costs, stats, cfg, pert, event_index=event)
    plain = lime.explain(model, data.X[event], costs, stats, cfg, pert, event_index=event,
                         penalize_costs=False)
    print(f"{lam:6.0f} {np.count_nonzero(ce.weights):8d}/{np.count_nonzero(plain.weights):<8d}"
          f" {ce.total_cost_of_nonzero:12.1f}/{plain.total_cost_of_nonzero:<12.1f}"
          f" {ce.local_fidelity:9.3f}/{plain.local_fidelity:.3f}")

# %% with lam = 10, which features survive the cost penalty
cfg = SolverConfig(lam=10.0, alpha=0.5)
ce = lime.explain(model, data.X[event], costs, stats, cfg, pert, event_index=event)
top = np.argsort(-np.abs(ce.weights))[:8]
for j in top:
    print(f"{data.feature_names[j]} {data.provenance[j]:>12} cost={costs[j]:5.2f} weight={ce.weights[j]: .4f}")

# %% the record behind a bar chart of weights and costs
rec = ce.to_record(data.feature_names)
print({k: v for k, v in rec.items() if k != "features"})
print(rec["features"][top[0]])
