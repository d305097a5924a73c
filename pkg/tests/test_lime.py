import numpy as np
import pytest

from celime import solver
from celime.blackbox import BlackBoxModel, train
from celime.datagen import ToySpec, generate_toy, sample_costs
from celime.lime import (
    Explanation,
    FeatureStats,
    PerturbationConfig,
    explain,
    kernel_weights,
    sample_perturbations,
)
from celime.solver import SolverConfig

P = 6


def unit_stats(p=P):
    return FeatureStats(mean=np.zeros(p), std=np.ones(p), boolean=np.zeros(p, dtype=bool))


@pytest.fixture(scope="module")
def toy():
    ds = generate_toy(ToySpec(seed=0))
    model = train(ds.X, ds.y)
    return ds, model, FeatureStats.from_data(ds.X), sample_costs(ds.p, seed=1)


class TestPerturbations:
    def test_zero_noise_repeats_x(self):
        x = np.arange(P, dtype=float)
        Z = sample_perturbations(x, unit_stats(), PerturbationConfig(n_samples=20, noise_scale=0.0))
        assert Z.shape == (20, P)
        np.testing.assert_array_equal(Z, np.tile(x, (20, 1)))

    def test_first_row_is_x(self):
        x = np.random.default_rng(0).normal(size=P)
        Z = sample_perturbations(x, unit_stats(), PerturbationConfig(n_samples=50))
        np.testing.assert_array_equal(Z[0], x)

    @pytest.mark.parametrize("scale", [0.5, 1.0, 2.0])
    def test_spread_matches_std(self, scale):
        std = np.array([0.1, 1.0, 3.0, 10.0, 0.5, 2.0])
        stats = FeatureStats(mean=np.zeros(P), std=std, boolean=np.zeros(P, dtype=bool))
        Z = sample_perturbations(np.ones(P), stats, PerturbationConfig(noise_scale=scale, seed=3))
        ratio = Z.std(axis=0, ddof=1) / (scale * std)
        assert np.all(np.abs(ratio - 1) < 0.10)

    def test_zero_std_never_perturbed(self):
        std = np.array([1.0, 0.0, 1.0, 0.0, 1.0, 1.0])
        stats = FeatureStats(mean=np.zeros(P), std=std, boolean=np.zeros(P, dtype=bool))
        x = np.full(P, 4.0)
        Z = sample_perturbations(x, stats, PerturbationConfig(n_samples=100))
        assert np.all(Z[:, [1, 3]] == 4.0)

    def test_deterministic(self):
        x = np.zeros(P)
        cfg = PerturbationConfig(n_samples=100, seed=9)
        np.testing.assert_array_equal(sample_perturbations(x, unit_stats(), cfg),
                                      sample_perturbations(x, unit_stats(), cfg))

    def test_booleans_resampled_from_marginal(self):
        boolean = np.array([True, False, False, False, False, False])
        stats = FeatureStats(mean=np.array([0.3, 0, 0, 0, 0, 0.0]), std=np.ones(P), boolean=boolean)
        x = np.zeros(P)
        x[0] = 1.0
        cfg = PerturbationConfig(n_samples=20000, boolean_resample_prob=0.1, seed=1)
        Z = sample_perturbations(x, stats, cfg)
        assert set(np.unique(Z[:, 0])) <= {0.0, 1.0}
        # P(entry becomes 0) = 0.1 * (1 - 0.3)
        assert np.mean(Z[:, 0] == 0) == pytest.approx(0.07, abs=0.01)

    def test_bad_stats(self):
        stats = FeatureStats(mean=np.zeros(P), std=np.full(P, np.nan), boolean=np.zeros(P, dtype=bool))
        with pytest.raises(ValueError):
            sample_perturbations(np.zeros(P), stats, PerturbationConfig())

    @pytest.mark.parametrize("kwargs", [{"n_samples": 5}, {"kernel_width": 0.0},
                                        {"noise_scale": -1.0}])
    def test_config_validation(self, kwargs):
        with pytest.raises(ValueError):
            PerturbationConfig(**kwargs)

    def test_default_width(self):
        assert PerturbationConfig().width_for(16) == pytest.approx(3.0)


class TestKernel:
    def test_identical_point(self):
        x = np.array([1.0, 2.0])
        assert kernel_weights(x, x[None, :], 1.3)[0] == 1.0

    def test_distance_equal_width(self):
        w = kernel_weights(np.zeros(2), np.array([[3.0, 4.0]]), 5.0)
        assert w[0] == pytest.approx(np.exp(-1))

    def test_standardized_distance(self):
        w = kernel_weights(np.zeros(2), np.array([[6.0, 0.0]]), 3.0, scale=np.array([2.0, 1.0]))
        assert w[0] == pytest.approx(np.exp(-1))

    def test_monotone_in_distance(self):
        d = np.linspace(0, 10, 200)
        w = kernel_weights(np.zeros(1), d[:, None], 2.0)
        assert np.all(np.diff(w) <= 0)
        assert np.all((w > 0) & (w <= 1))

    def test_bad_width(self):
        with pytest.raises(ValueError):
            kernel_weights(np.zeros(1), np.zeros((1, 1)), 0.0)


def single_feature_model(k, p, rng):
    w = np.zeros(p)
    w[k] = rng.choice([-1, 1]) * rng.uniform(0.5, 3.0)
    return BlackBoxModel(weights=w, intercept=rng.normal())


def test_single_weight_black_box_top_feature():
    rng = np.random.default_rng(0)
    pert = PerturbationConfig(n_samples=1000, seed=2)
    for _ in range(20):
        k = int(rng.integers(P))
        model = single_feature_model(k, P, rng)
        x = rng.normal(scale=0.5, size=P)
        e = explain(model, x, rng.uniform(0.5, 2.0, size=P), unit_stats(), SolverConfig(lam=1.0), pert)
        assert int(np.argmax(np.abs(e.weights))) == k


def suppression_threshold(model, x, costs, k, cfg, pert):
    c = costs.copy()
    while True:
        e = explain(model, x, c, unit_stats(), cfg, pert)
        if e.weights[k] == 0:
            return c[k]
        c[k] *= 2
        assert c[k] < 1e12


def test_cost_suppression():
    rng = np.random.default_rng(1)
    cfg = SolverConfig(lam=1.0, alpha=0.5)
    pert = PerturbationConfig(n_samples=500, seed=4)
    model = BlackBoxModel(weights=rng.normal(size=P) * 2, intercept=0.0)
    x = rng.normal(size=P)
    costs = np.ones(P)
    for k in range(P):
        c_star = suppression_threshold(model, x, costs, k, cfg, pert)
        for mult in (1.0, 2.0, 10.0):
            c = costs.copy()
            c[k] = c_star * mult
            e = explain(model, x, c, unit_stats(), cfg, pert)
            assert e.weights[k] == 0.0
            assert e.total_cost_of_nonzero == pytest.approx(c[e.weights != 0].sum())


def test_small_lambda_matches_local_gradient():
    rng = np.random.default_rng(2)
    pert = PerturbationConfig(n_samples=5000, seed=5)
    for _ in range(10):
        model = BlackBoxModel(weights=rng.normal(size=P), intercept=rng.normal())
        x = rng.normal(scale=0.5, size=P)
        e = explain(model, x, np.ones(P), unit_stats(), SolverConfig(lam=1e-6), pert)
        # the logistic's gradient at x is p(1-p) w, so its direction is w
        cos = e.weights @ model.weights / (np.linalg.norm(e.weights) * np.linalg.norm(model.weights))
        assert cos > 0.95


def test_raising_zero_weight_cost_keeps_it_zero():
    rng = np.random.default_rng(3)
    cfg = SolverConfig(lam=50.0, alpha=0.5, tolerance=1e-10)
    pert = PerturbationConfig(n_samples=400, seed=6)
    checked = 0
    for _ in range(10):
        model = BlackBoxModel(weights=rng.normal(size=P), intercept=0.0)
        x = rng.normal(size=P)
        costs = rng.uniform(0.5, 5.0, size=P)
        e = explain(model, x, costs, unit_stats(), cfg, pert)
        for k in np.flatnonzero(e.weights == 0):
            raised = costs.copy()
            raised[k] *= 1 + rng.uniform(0.1, 5)
            e2 = explain(model, x, raised, unit_stats(), cfg, pert)
            assert e2.weights[k] == 0
            checked += 1
    assert checked > 0


def test_surrogate_satisfies_optimality():
    rng = np.random.default_rng(4)
    model = BlackBoxModel(weights=rng.normal(size=P), intercept=0.3)
    x = rng.normal(size=P)
    costs = rng.uniform(0.5, 5.0, size=P)
    cfg = SolverConfig(lam=5.0, tolerance=1e-10)
    pert = PerturbationConfig(n_samples=300, seed=1)
    e = explain(model, x, costs, unit_stats(), cfg, pert, event_index=7)
    # rebuild the weighted problem independently and check the conditions
    from celime.blackbox import predict_proba
    Z = sample_perturbations(x, unit_stats(), pert, rng=np.random.default_rng([1, 7]))
    kw = kernel_weights(x, Z, pert.width_for(P), scale=np.ones(P))
    coef = solver.Coefficients(beta=e.weights, intercept=e.intercept, objective_value=0.0,
                               sweeps_used=0, converged=True, zero_variance=np.zeros(P, dtype=bool))
    viol = solver.optimality_violation(Z, predict_proba(model, Z), coef, costs, cfg.with_weights(kw))
    assert np.max(viol) < 1e-5


def test_unit_cost_switch():
    rng = np.random.default_rng(5)
    model = BlackBoxModel(weights=rng.normal(size=P), intercept=0.0)
    x = rng.normal(size=P)
    costs = rng.uniform(1, 10, size=P)
    pert = PerturbationConfig(n_samples=300)
    plain = explain(model, x, np.ones(P), unit_stats(), pert_cfg=pert)
    switched = explain(model, x, costs, unit_stats(), pert_cfg=pert, penalize_costs=False)
    np.testing.assert_array_equal(plain.weights, switched.weights)
    np.testing.assert_array_equal(switched.costs, costs)


def test_deterministic_and_order_free():
    rng = np.random.default_rng(6)
    model = BlackBoxModel(weights=rng.normal(size=P), intercept=0.0)
    X = rng.normal(size=(3, P))
    pert = PerturbationConfig(n_samples=200, seed=8)
    fwd = [explain(model, X[i], np.ones(P), unit_stats(), pert_cfg=pert, event_index=i) for i in range(3)]
    rev = [explain(model, X[i], np.ones(P), unit_stats(), pert_cfg=pert, event_index=i) for i in (2, 1, 0)]
    for a, b in zip(fwd, rev[::-1]):
        np.testing.assert_array_equal(a.weights, b.weights)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        explain(BlackBoxModel(weights=np.zeros(3), intercept=0.0), np.zeros(4), np.ones(4),
                unit_stats(4))


def test_fidelity_floor_on_toy(toy):
    ds, model, stats, costs = toy
    rng = np.random.default_rng(7)
    vals = []
    for i in rng.choice(ds.n, size=10, replace=False):
        e = explain(model, ds.X[i], costs, stats, event_index=int(i))
        assert e.local_fidelity <= 1.0
        assert e.total_cost_of_nonzero == pytest.approx(costs[e.weights != 0].sum())
        vals.append(e.local_fidelity)
    assert np.mean(vals) > 0.5


def test_record_layout():
    e = Explanation(event_index=3, weights=np.array([0.5, 0.0]), intercept=0.1, local_fidelity=0.9,
                    total_cost_of_nonzero=2.0, costs=np.array([2.0, 7.0]))
    rec = e.to_record(["a", "b"])
    assert rec["event_index"] == 3
    assert rec["features"] == [{"name": "a", "weight": 0.5, "cost": 2.0},
                               {"name": "b", "weight": 0.0, "cost": 7.0}]
    assert rec["intercept"] == 0.1 and rec["local_fidelity"] == 0.9
