"""Cost-effective local explanations: cost-weighted elastic net surrogates,
submodular-pick feature ordering and cost-versus-accuracy evaluation."""

from .blackbox import BlackBoxModel, predict_label, predict_proba, train
from .datagen import Dataset, ToySpec, generate_toy, sample_costs
from .evaluation import EvalConfig, MethodId, run_trial
from .lime import Explanation, FeatureStats, PerturbationConfig, explain
from .pick import feature_ordering, greedy_pick, importance_vector
from .solver import Coefficients, SolverConfig, fit, objective, soft_threshold

__version__ = "0.1.0"
