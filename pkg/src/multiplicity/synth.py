"""Synthetic Rashomon sets with controlled accuracy and error correlation.

Errors are a mixture of a shared and a private indicator.  For every sample
``i`` a shared error flag ``S_i ~ Bernoulli(1 - p)`` is drawn once; every
model ``m`` draws a private flag ``I_mi ~ Bernoulli(1 - p)`` and a selector
``B_mi ~ Bernoulli(rho)``, and errs iff ``S_i`` (when ``B_mi``) or ``I_mi``
(otherwise).  The marginal error rate is exactly ``1 - p`` for any ``rho``;
two models' error flags have correlation ``rho**2``.  ``rho = 0`` gives
independent errors, ``rho = 1`` makes all models err on the same samples.

A wrong prediction is uniform over the ``K - 1`` wrong classes, drawn per
(model, sample), so with ``K = 2`` shared errors are identical predictions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import LABELS, GroundTruth, ModelRecord, PredictionMatrix, RashomonSet, build_rashomon_set
from .errors import InvalidConfig
from .rng import stream

_TEST, _VAL = 0, 1


@dataclass(frozen=True)
class SynthConfig:
    n_models: int
    n_samples: int
    num_classes: int = 2
    target_accuracy: float = 0.9
    error_correlation: float = 0.0
    rng_seed: int = 0
    n_val_samples: Optional[int] = None
    val_error_correlation: Optional[float] = None

    def __post_init__(self):
        if int(self.n_models) < 1 or int(self.n_samples) < 1:
            raise InvalidConfig("n_models and n_samples must be positive")
        if int(self.num_classes) < 2:
            raise InvalidConfig("num_classes must be at least 2")
        if not 0.0 <= float(self.target_accuracy) <= 1.0:
            raise InvalidConfig("target_accuracy must lie in [0, 1]")
        for name in ("error_correlation", "val_error_correlation"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= float(value) <= 1.0:
                raise InvalidConfig(f"{name} must lie in [0, 1]")
        if self.n_val_samples is not None and int(self.n_val_samples) < 1:
            raise InvalidConfig("n_val_samples must be positive")

    @property
    def val_samples(self) -> int:
        return self.n_samples if self.n_val_samples is None else int(self.n_val_samples)

    @property
    def val_rho(self) -> float:
        return self.error_correlation if self.val_error_correlation is None else self.val_error_correlation


def simulate_split(n_models: int, n_samples: int, num_classes: int, p: float, rho: float,
                   seed: int, split: int = _TEST):
    """Truth vector and ``(n_models, n_samples)`` predicted labels for one split."""
    q = 1.0 - p
    truth = stream(seed, split, 0).integers(num_classes, size=n_samples)
    shared = stream(seed, split, 1).random(n_samples) < q
    preds = np.empty((n_models, n_samples), dtype=np.int64)
    for m in range(n_models):
        rng = stream(seed, split, 2, m)
        use_shared = rng.random(n_samples) < rho
        private = rng.random(n_samples) < q
        wrong = np.where(use_shared, shared, private)
        shift = rng.integers(1, num_classes, size=n_samples)
        preds[m] = np.where(wrong, (truth + shift) % num_classes, truth)
    return truth, preds


def generate(config: SynthConfig) -> RashomonSet:
    """Build a synthetic set with test and validation splits.

    ``val_metric`` and ``test_metric`` of each record are the realised
    validation and test accuracies.
    """
    c = config
    width = max(3, len(str(c.n_models - 1)))
    model_ids = [f"m{j:0{width}d}" for j in range(c.n_models)]
    splits = {}
    for split, n, rho, prefix in ((_TEST, c.n_samples, c.error_correlation, "t"),
                                  (_VAL, c.val_samples, c.val_rho, "v")):
        truth, preds = simulate_split(c.n_models, n, c.num_classes, c.target_accuracy,
                                      rho, c.rng_seed, split)
        sample_ids = [f"{prefix}{i:06d}" for i in range(n)]
        splits[split] = (
            PredictionMatrix(LABELS, preds, model_ids, sample_ids, num_classes=c.num_classes),
            GroundTruth(truth, c.num_classes, sample_ids),
            np.mean(preds == truth[None, :], axis=1),
        )
    records = [ModelRecord(model_ids[j], seed=j, val_metric=float(splits[_VAL][2][j]),
                           test_metric=float(splits[_TEST][2][j]))
               for j in range(c.n_models)]
    return build_rashomon_set(records, splits[_TEST][0], splits[_TEST][1],
                              splits[_VAL][0], splits[_VAL][1])
