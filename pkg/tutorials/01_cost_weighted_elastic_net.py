"""Cost-weighted elastic net: how feature costs shape a sparse fit.

Run with ``python tutorials/01_cost_weighted_elastic_net.py``.
"""

# %%
import numpy as np

from celime.solver import SolverConfig, fit, objective

rng = np.random.default_rng(0)
n, p = 200, 6
X = rng.standard_normal((n, p))
true_beta = np.array([2.0, -1.5, 1.0, 0.0, 0.0, 0.5])
y = X @ true_beta + 0.3 * rng.standard_normal(n) + 4.0  # intercept is never penalized

# %% unit costs give an ordinary elastic net
cfg = SolverConfig(lam=20.0, alpha=0.5)
plain = fit(X, y, np.ones(p), cfg)
print("unit costs     ", np.round(plain.beta, 3), "intercept", round(plain.intercept, 3))

# %% an expensive feature is shrunk harder and eventually dropped
costs = np.ones(p)
for c0 in (1.0, 5.0, 20.0, 80.0):
    costs[0] = c0
    b = fit(X, y, costs, cfg).beta
    print(f"cost[0] = {c0:5.1f}  beta[0] = {b[0]: .4f}  nonzero = {np.count_nonzero(b)}")

# %% alpha moves the penalty between L1 (alpha = 0, lasso) and L2 (alpha = 1, ridge)
for alpha in (0.0, 0.5, 1.0):
    b = fit(X, y, np.ones(p), SolverConfig(lam=200.0, alpha=alpha)).beta
    print(f"alpha = {alpha:.1f}", np.round(b, 3))

# %% the fit reports its own objective and convergence
print("objective", plain.objective_value, "sweeps", plain.sweeps_used, "converged", plain.converged)
assert np.isclose(plain.objective_value, objective(X, y, plain.beta, plain.intercept, np.ones(p), cfg))
