"""Performance and predictive multiplicity metrics.

Ambiguity is the fraction of test samples on which the considered models do
not all emit the same prediction.  Relaxed ambiguity only counts a sample as
ambiguous when no single label gathers at least ``ceil(tau * M)`` votes.
Pairwise agreement compares two disjoint, equally sized entities (single
models or consensus ensembles) sample by sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.stats import rankdata

from .core import LABELS, SCORES, RashomonSet, pack_multilabel
from .errors import (
    DegenerateClass,
    InsufficientModels,
    InputError,
    ModeMismatch,
    OverlappingEntities,
    SizeMismatch,
)
from .rng import stream
from .voting import ABSTAIN, UNANIMITY, ConsensusRule, consensus

Entity = Union[str, Sequence[str]]


def accuracy(predictions, truth) -> float:
    """Fraction of samples whose predicted label equals the true label."""
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if predictions.ndim != 1 or truth.ndim != 1:
        raise ModeMismatch("accuracy expects single-label label vectors")
    if np.issubdtype(predictions.dtype, np.floating) and np.any(predictions != np.round(predictions)):
        raise ModeMismatch("accuracy expects hard labels, got scores")
    if predictions.shape != truth.shape:
        raise InputError(f"{predictions.shape[0]} predictions for {truth.shape[0]} labels")
    return float(np.mean(predictions == truth))


def model_accuracies(rset: RashomonSet, split: str = "test") -> np.ndarray:
    """Accuracy of every model of the set, in set order.

    Multi-label sets use exact-match accuracy (all targets correct).
    """
    preds, truth = _split(rset, split)
    if preds.mode != LABELS:
        raise ModeMismatch("accuracy requires label-mode predictions")
    return np.mean(preds.codes == truth.codes[None, :], axis=1)


def _split(rset: RashomonSet, split: str):
    if split == "test":
        return rset.test_predictions, rset.ground_truth_test
    if split == "val":
        if rset.val_predictions is None:
            raise InputError("the set has no validation split")
        return rset.val_predictions, rset.ground_truth_val
    raise InputError(f"unknown split {split!r}")


def roc_auc(scores, truth) -> float:
    """Rank-based ROC-AUC of one score vector against binary truth.

    Equals the probability that a random positive outscores a random
    negative, counting ties as one half.
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    if scores.shape != truth.shape or scores.ndim != 1:
        raise InputError("roc_auc expects two vectors of equal length")
    positive = truth == 1
    n_pos = int(positive.sum())
    n_neg = truth.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateClass("ROC-AUC needs at least one positive and one negative sample")
    ranks = rankdata(scores, method="average")
    u_statistic = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u_statistic / (n_pos * n_neg))


def mean_roc_auc(scores, truth) -> float:
    """ROC-AUC computed per target column and averaged."""
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    if scores.ndim != 2 or scores.shape != truth.shape:
        raise InputError("mean_roc_auc expects (n_samples, n_targets) arrays of equal shape")
    return float(np.mean([roc_auc(scores[:, j], truth[:, j]) for j in range(scores.shape[1])]))


def model_roc_aucs(rset: RashomonSet, split: str = "test") -> np.ndarray:
    """ROC-AUC per model from score-mode predictions.

    Multi-label: mean over targets.  Binary: AUC of the positive-class score.
    Multiclass: one-vs-rest AUC averaged over classes.
    """
    preds, truth = _split(rset, split)
    if preds.mode != SCORES:
        raise ModeMismatch("ROC-AUC requires score-mode predictions")
    entries = preds.entries
    if truth.multilabel:
        targets = truth.labels
    else:
        targets = np.eye(truth.num_classes, dtype=np.int64)[truth.labels]
    out = []
    for m in range(preds.n_models):
        if truth.multilabel:
            out.append(mean_roc_auc(entries[m], targets))
        elif entries.shape[2] == 1:
            out.append(roc_auc(entries[m, :, 0], truth.labels))
        elif entries.shape[2] == 2:
            out.append(roc_auc(entries[m, :, 1], truth.labels))
        else:
            out.append(mean_roc_auc(entries[m], targets))
    return np.array(out)


def _subset_codes(rset: RashomonSet, model_subset: Entity) -> np.ndarray:
    index = rset.indices(model_subset)
    if index.size == 0:
        raise InputError("model subset must not be empty")
    return rset.codes[index]


def ambiguity_of_codes(codes: np.ndarray) -> float:
    return float(np.mean(np.any(codes != codes[0], axis=0)))


def ambiguity(rset: RashomonSet, model_subset: Entity) -> float:
    """Fraction of test samples on which the subset's predictions are not all identical."""
    return ambiguity_of_codes(_subset_codes(rset, model_subset))


def relaxed_ambiguity(rset: RashomonSet, model_subset: Entity, tau: float) -> float:
    """Fraction of test samples where no unique label reaches ``ceil(tau * M)`` votes.

    ``tau = 1`` gives exactly :func:`ambiguity`.
    """
    rule = ConsensusRule(tau)
    codes = _subset_codes(rset, model_subset)
    return float(np.mean(consensus(codes, rule.tau) == ABSTAIN))


def _entity_decisions(rset: RashomonSet, index: np.ndarray, rule: ConsensusRule) -> np.ndarray:
    codes = rset.codes[index]
    if index.size == 1:
        return codes[0]
    return consensus(codes, rule.tau)


def _entity_index(rset: RashomonSet, entity_a: Entity, entity_b: Entity):
    a = rset.indices(entity_a)
    b = rset.indices(entity_b)
    if a.size == 0 or b.size == 0:
        raise InputError("entities must not be empty")
    if a.size != b.size:
        raise SizeMismatch(f"entities have {a.size} and {b.size} models")
    if np.intersect1d(a, b).size:
        raise OverlappingEntities("entities must not share models")
    return a, b


def _agreement_from_decisions(dec_a, dec_b, normalize: bool, truth=None):
    both = (dec_a != ABSTAIN) & (dec_b != ABSTAIN)
    match = both & (dec_a == dec_b)
    if truth is not None:
        match &= dec_a == truth
    joint_coverage = float(np.mean(both))
    agreement = float(np.mean(match))
    if normalize:
        agreement = agreement / joint_coverage if joint_coverage > 0 else float("nan")
    return agreement, joint_coverage


def pairwise_agreement(rset: RashomonSet, entity_a: Entity, entity_b: Entity,
                       rule: ConsensusRule = UNANIMITY, normalize: bool = False):
    """Agreement and joint coverage of two disjoint entities on the test split.

    A sample agrees when both entities predict (under ``rule``) and the
    predictions match.  Unnormalised agreement is taken over all test
    samples; normalised agreement divides by the joint coverage (NaN when
    the entities never predict together).

    Returns
    -------
    (agreement, joint_coverage)
    """
    a, b = _entity_index(rset, entity_a, entity_b)
    return _agreement_from_decisions(_entity_decisions(rset, a, rule),
                                     _entity_decisions(rset, b, rule), normalize)


def multilabel_pair_agreement(rset: RashomonSet, model_a: str, model_b: str,
                              truth=None) -> float:
    """Fraction of samples on which both models get every target right."""
    preds = rset.test_predictions
    if not preds.multilabel or preds.mode != LABELS:
        raise ModeMismatch("multi-label agreement needs thresholded multi-label predictions")
    a, b = _entity_index(rset, model_a, model_b)
    if truth is None:
        truth_codes = rset.truth_codes
    else:
        truth = np.asarray(truth)
        if truth.shape != preds.entries.shape[1:]:
            raise InputError("truth must be (n_samples, n_targets)")
        truth_codes = pack_multilabel(truth)
    codes = rset.codes
    return float(np.mean((codes[a[0]] == truth_codes) & (codes[b[0]] == truth_codes)))


@dataclass(frozen=True)
class AgreementSummary:
    """Statistics of repeated pairwise-agreement draws.

    Standard deviations use the population formula.  ``agreements``,
    ``coverages`` and ``first_accuracies`` hold the raw per-pair values;
    ``first_accuracies`` is the selective accuracy of the first entity of
    each pair (NaN where it never predicts).
    """

    mean_agreement: float
    std_agreement: float
    mean_coverage: float
    std_coverage: float
    normalized: bool
    num_pairs: int
    ensemble_size: int
    tau: float
    rng_seed: int
    criterion: str
    agreements: tuple
    coverages: tuple
    first_accuracies: tuple


def sample_pair(rng: np.random.Generator, n_models: int, ensemble_size: int):
    """Draw two disjoint index sets of ``ensemble_size`` models each."""
    perm = rng.permutation(n_models)
    return perm[:ensemble_size], perm[ensemble_size:2 * ensemble_size]


def expected_pairwise_agreement(rset: RashomonSet, ensemble_size: int,
                                rule: ConsensusRule = UNANIMITY, num_pairs: int = 100,
                                normalize: bool = False, rng_seed: int = 0,
                                criterion: str = "match") -> AgreementSummary:
    """Average agreement between randomly drawn disjoint entities.

    Each repetition draws a baseline entity of ``ensemble_size`` models
    uniformly without replacement and a competing entity from the remaining
    models.  Repetition ``r`` uses its own random stream derived from
    ``(rng_seed, r)``.

    ``criterion="correct"`` only counts samples on which both entities
    predict the true label (used for multi-label tasks, where agreement
    means both get all targets right).
    """
    m = int(ensemble_size)
    if m < 1:
        raise InputError("ensemble_size must be positive")
    if 2 * m > rset.n_models:
        raise InsufficientModels(
            f"ensemble size {m} needs {2 * m} models, the set has {rset.n_models}")
    if num_pairs < 1:
        raise InputError("num_pairs must be positive")
    if criterion not in ("match", "correct"):
        raise InputError(f"unknown agreement criterion {criterion!r}")
    truth = rset.truth_codes
    codes = rset.codes
    agreements, coverages, first_acc = [], [], []
    for r in range(num_pairs):
        a, b = sample_pair(stream(rng_seed, r), rset.n_models, m)
        dec_a = codes[a[0]] if m == 1 else consensus(codes[a], rule.tau)
        dec_b = codes[b[0]] if m == 1 else consensus(codes[b], rule.tau)
        agree, cov = _agreement_from_decisions(
            dec_a, dec_b, normalize, truth if criterion == "correct" else None)
        agreements.append(agree)
        coverages.append(cov)
        covered = dec_a != ABSTAIN
        first_acc.append(float(np.mean(dec_a[covered] == truth[covered]))
                         if covered.any() else float("nan"))
    agreements = np.array(agreements)
    coverages = np.array(coverages)
    return AgreementSummary(
        mean_agreement=float(np.mean(agreements)),
        std_agreement=float(np.std(agreements)),
        mean_coverage=float(np.mean(coverages)),
        std_coverage=float(np.std(coverages)),
        normalized=bool(normalize),
        num_pairs=int(num_pairs),
        ensemble_size=m,
        tau=rule.tau,
        rng_seed=int(rng_seed),
        criterion=criterion,
        agreements=tuple(agreements.tolist()),
        coverages=tuple(coverages.tolist()),
        first_accuracies=tuple(first_acc),
    )
