"""Predictive multiplicity analysis for empirical Rashomon sets."""

__version__ = "0.1.0"

from .core import (
    GroundTruth,
    ModelRecord,
    PredictionMatrix,
    RashomonSet,
    build_rashomon_set,
    threshold_scores,
)
from .ensemble import (
    AmbiguityCurve,
    EnsembleDecision,
    SelectiveCurve,
    ambiguity_curve,
    coverage,
    ensemble_predict,
    selective_accuracy,
    selective_curve,
)
from .metrics import (
    AgreementSummary,
    accuracy,
    ambiguity,
    expected_pairwise_agreement,
    mean_roc_auc,
    model_accuracies,
    model_roc_aucs,
    multilabel_pair_agreement,
    pairwise_agreement,
    relaxed_ambiguity,
    roc_auc,
)
from .stats import (
    FTestResult,
    SimulatedAccuracySample,
    analytic_ambiguity,
    f_test_variance,
    independent_agreement_oracle,
    simulate_independent_accuracies,
    summarize,
)
from .synth import SynthConfig, generate
from .voting import UNANIMITY, ConsensusRule
from .kde import KdeGrid, kde_grid

__all__ = [
    "GroundTruth",
    "ModelRecord",
    "PredictionMatrix",
    "RashomonSet",
    "build_rashomon_set",
    "threshold_scores",
    "AmbiguityCurve",
    "EnsembleDecision",
    "SelectiveCurve",
    "ambiguity_curve",
    "coverage",
    "ensemble_predict",
    "selective_accuracy",
    "selective_curve",
    "AgreementSummary",
    "accuracy",
    "ambiguity",
    "expected_pairwise_agreement",
    "mean_roc_auc",
    "model_accuracies",
    "model_roc_aucs",
    "multilabel_pair_agreement",
    "pairwise_agreement",
    "relaxed_ambiguity",
    "roc_auc",
    "FTestResult",
    "SimulatedAccuracySample",
    "analytic_ambiguity",
    "f_test_variance",
    "independent_agreement_oracle",
    "simulate_independent_accuracies",
    "summarize",
    "SynthConfig",
    "generate",
    "UNANIMITY",
    "ConsensusRule",
    "KdeGrid",
    "kde_grid",
]
