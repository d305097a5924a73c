"""From many local explanations to one global feature ordering.

Run with ``python tutorials/03_submodular_pick.py``.
"""

# %%
import numpy as np

from celime import blackbox, datagen, lime, pick

data = datagen.generate_toy(datagen.ToySpec(seed=4))
costs = datagen.sample_costs(data.p, seed=5)
model = blackbox.train(data.X, data.y)
stats = lime.FeatureStats.from_data(data.X)

# %% explain 30 events; each row of W is one explanation
rows = np.random.default_rng(6).choice(data.n, size=30, replace=False)
W = pick.explanation_matrix(model, data.X[rows], costs, stats,
                            pert_cfg=lime.PerturbationConfig(n_samples=2000), event_indices=rows)
print("W shape", W.W.shape, "all converged", bool(W.converged.all()))

# %% importance I_j = sqrt(sum_i |W_ij|) and the ordering it induces
imp = pick.importance_vector(W)
order = pick.feature_ordering(imp)
for j in order[:10]:
    print(f"{data.feature_names[j]} {data.provenance[j]:>12} I={imp[j]:.3f} cost={costs[j]:.2f}")

# %% greedy coverage picks a handful of representative events
chosen, gains = pick.greedy_pick(W, imp, budget=5, return_gains=True)
print("picked events", rows[chosen].tolist())
print("marginal gains", np.round(gains, 3).tolist())  # non-increasing by submodularity
