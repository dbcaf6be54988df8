"""Fairness interventions built on conformance constraints.

``ConfairReweigher`` boosts training weights of tuples that conform to their
own (group, label) cell; ``DiffairClassifier`` trains one model per group and
routes each serving tuple by constraint violation instead of group flag.
"""

from .baselines import KamReweigher, MultiModelClassifier, kam_weights
from .confair import ConfairConfig, ConfairReweigher, assign_weights, tune_alpha
from .conformance import Constraint, ConstraintSet, ConformanceProfiler, derive_ccs, min_violation
from .dataset import Column, Dataset, GroupSpec, SplitIndices, load_csv, split
from .density import DensityConfig, filter_densest, kde
from .diffair import DiffairClassifier
from .exceptions import ConformFairError
from .experiment import ExperimentConfig, run_experiment
from .learner import LearnerConfig, LogisticClassifier, StumpEnsembleClassifier
from .metrics import EvaluationReport, evaluate
from .synth import SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "Column", "ConfairConfig", "ConfairReweigher", "ConformFairError", "ConformanceProfiler",
    "Constraint", "ConstraintSet", "Dataset", "DensityConfig", "DiffairClassifier",
    "EvaluationReport", "ExperimentConfig", "GroupSpec", "KamReweigher", "LearnerConfig",
    "LogisticClassifier", "MultiModelClassifier", "SplitIndices", "StumpEnsembleClassifier",
    "SynthConfig", "assign_weights", "derive_ccs", "evaluate", "filter_densest", "generate",
    "kam_weights", "kde", "load_csv", "min_violation", "run_experiment", "split", "tune_alpha",
]
