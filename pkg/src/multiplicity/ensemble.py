"""Consensus ensembles with abstention and model-count curves.

An ensemble predicts a label only when a unique label gathers at least
``ceil(tau * M)`` of its ``M`` members' votes; otherwise it abstains.
Coverage is the fraction of test samples on which it predicts, selective
accuracy its accuracy on those samples.

Curves add models one at a time in one of three orders: ``random`` (repeated
with independent streams, summarised by mean and 25/75 percentiles),
``ascending_val`` or ``descending_val`` (by validation metric, ties broken
by model id).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import RashomonSet, pack_multilabel
from .errors import InputError, MissingValMetric, SampleOutOfRange, UnknownStrategy
from .rng import stream
from .voting import ABSTAIN, UNANIMITY, ConsensusRule, consensus, required_votes

__all__ = [
    "ConsensusRule",
    "UNANIMITY",
    "EnsembleDecision",
    "AmbiguityCurve",
    "SelectiveCurve",
    "STRATEGIES",
    "ensemble_predict",
    "coverage",
    "selective_accuracy",
    "model_order",
    "ambiguity_curve",
    "selective_curve",
]

STRATEGIES = ("random", "ascending_val", "descending_val")


@dataclass(frozen=True)
class EnsembleDecision:
    """Outcome of one ensemble on one sample.

    ``label`` is None when the ensemble abstains.  ``votes`` maps each
    predicted label to its number of members; ``agreeing_fraction`` is the
    modal vote share.
    """

    label: object
    votes: dict
    agreeing_fraction: float

    @property
    def abstained(self) -> bool:
        return self.label is None


def _members(rset: RashomonSet, member_ids) -> np.ndarray:
    index = rset.indices(member_ids)
    if index.size == 0:
        raise InputError("an ensemble needs at least one member")
    return index


def ensemble_predict(rset: RashomonSet, member_ids, sample_index: int,
                     rule: ConsensusRule = UNANIMITY) -> EnsembleDecision:
    index = _members(rset, member_ids)
    if not 0 <= sample_index < rset.n_samples:
        raise SampleOutOfRange(f"sample index {sample_index} outside [0, {rset.n_samples})")
    column = rset.codes[index, sample_index]
    values, counts = np.unique(column, return_counts=True)
    votes = {rset.decode(v): int(c) for v, c in zip(values, counts)}
    top = int(counts.max())
    label = None
    if top >= rule.required_votes(index.size) and int((counts == top).sum()) == 1:
        label = rset.decode(values[np.argmax(counts)])
    return EnsembleDecision(label, votes, top / index.size)


def coverage(rset: RashomonSet, member_ids, rule: ConsensusRule = UNANIMITY) -> float:
    """Fraction of test samples on which the ensemble predicts."""
    index = _members(rset, member_ids)
    return float(np.mean(consensus(rset.codes[index], rule.tau) != ABSTAIN))


def selective_accuracy(rset: RashomonSet, member_ids, rule: ConsensusRule = UNANIMITY,
                       truth=None):
    """Coverage and accuracy on covered samples.

    Returns ``(coverage, accuracy)`` where ``accuracy`` is None if the
    ensemble never predicts.  ``truth`` defaults to the set's test labels.
    """
    index = _members(rset, member_ids)
    truth_codes = rset.truth_codes if truth is None else _truth_codes(rset, truth)
    decisions = consensus(rset.codes[index], rule.tau)
    covered = decisions != ABSTAIN
    n_covered = int(covered.sum())
    if n_covered == 0:
        return 0.0, None
    correct = int((decisions[covered] == truth_codes[covered]).sum())
    return n_covered / rset.n_samples, correct / n_covered


def _truth_codes(rset: RashomonSet, truth) -> np.ndarray:
    truth = np.asarray(truth, dtype=np.int64)
    if rset.multilabel:
        truth = pack_multilabel(truth)
    if truth.shape != (rset.n_samples,):
        raise InputError("truth does not match the number of test samples")
    return truth


def model_order(rset: RashomonSet, strategy: str,
                rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Row indices of the set in the order a curve adds them."""
    if strategy == "random":
        if rng is None:
            raise InputError("random order needs a generator")
        return rng.permutation(rset.n_models)
    if strategy not in STRATEGIES:
        raise UnknownStrategy(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    metrics = rset.val_metrics()
    if np.any(np.isnan(metrics)):
        missing = [r.model_id for r in rset.records if r.val_metric is None]
        raise MissingValMetric(f"no val_metric for model(s) {missing[:5]}")
    ids = rset.model_ids
    sign = 1.0 if strategy == "ascending_val" else -1.0
    return np.array(sorted(range(rset.n_models), key=lambda i: (sign * metrics[i], ids[i])),
                    dtype=np.int64)


def _consensus_path(codes: np.ndarray, tau: float):
    """Ensemble decisions of the first k rows, for every k.

    Returns an ``(M, N)`` array whose row ``k - 1`` holds the decisions of
    the ensemble made of the first ``k`` rows.
    """
    n_models, n_samples = codes.shape
    out = np.empty_like(codes)
    if tau == 1.0:
        broken = np.logical_or.accumulate(codes != codes[0], axis=0)
        out[:] = np.where(broken, ABSTAIN, codes[0])
        return out
    values, inverse = np.unique(codes, return_inverse=True)
    inverse = inverse.reshape(codes.shape)
    counts = np.zeros((values.size, n_samples), dtype=np.int64)
    columns = np.arange(n_samples)
    for k in range(n_models):
        counts[inverse[k], columns] += 1
        top = counts.max(axis=0)
        unique = (counts == top).sum(axis=0) == 1
        ok = unique & (top >= required_votes(tau, k + 1))
        out[k] = np.where(ok, values[np.argmax(counts, axis=0)], ABSTAIN)
    return out


def _summary(runs: np.ndarray):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        mean = np.nanmean(runs, axis=0)
        q25, q75 = np.nanpercentile(runs, [25, 75], axis=0)
    return mean, q25, q75


def _orders(rset, strategy, repetitions, rng_seed, members):
    if members is not None:
        index = _members(rset, members)
        if len(set(index.tolist())) != index.size:
            raise InputError("member list contains duplicates")
        return [index], 1
    if strategy not in STRATEGIES:
        raise UnknownStrategy(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if strategy == "random":
        if repetitions < 1:
            raise InputError("repetitions must be positive")
        return [model_order(rset, strategy, stream(rng_seed, r)) for r in range(repetitions)], repetitions
    return [model_order(rset, strategy)], 1


@dataclass(frozen=True)
class AmbiguityCurve:
    """Ambiguity of the first k models, k = 1..n.

    ``runs[r, k - 1]`` is the value of repetition ``r``; ``mean``, ``iqr25``
    and ``iqr75`` summarise over repetitions (linear interpolation between
    order statistics).
    """

    strategy: str
    tau: float
    repetitions: int
    rng_seed: int
    num_models: np.ndarray
    mean: np.ndarray
    iqr25: np.ndarray
    iqr75: np.ndarray
    runs: np.ndarray

    @property
    def points(self):
        return list(zip(self.num_models.tolist(), self.mean.tolist(),
                        self.iqr25.tolist(), self.iqr75.tolist()))


def ambiguity_curve(rset: RashomonSet, strategy: str = "random", tau: float = 1.0,
                    repetitions: int = 50, rng_seed: int = 0,
                    members: Optional[Sequence[str]] = None,
                    max_models: Optional[int] = None) -> AmbiguityCurve:
    """(Relaxed) ambiguity on the test split as models are added.

    Deterministic strategies, or an explicit ``members`` order, produce a
    single run.  ``max_models`` truncates the curve.
    """
    rule = ConsensusRule(tau)
    orders, reps = _orders(rset, strategy, repetitions, rng_seed, members)
    if max_models is not None:
        orders = [o[:max_models] for o in orders]
    runs = np.array([np.mean(_consensus_path(rset.codes[o], rule.tau) == ABSTAIN, axis=1)
                     for o in orders])
    mean, q25, q75 = _summary(runs)
    if reps == 1:
        q25 = q75 = mean = runs[0]
    return AmbiguityCurve(
        strategy="members" if members is not None else strategy,
        tau=rule.tau, repetitions=reps, rng_seed=int(rng_seed),
        num_models=np.arange(1, runs.shape[1] + 1), mean=mean, iqr25=q25, iqr75=q75,
        runs=runs)


@dataclass(frozen=True)
class SelectiveCurve:
    """Coverage and selective accuracy of the first k models, k = 1..n.

    ``accuracy_runs`` is NaN where the ensemble never predicts.
    ``best_single_accuracy`` is the highest full-coverage accuracy of any
    single model in the set.
    """

    strategy: str
    tau: float
    repetitions: int
    rng_seed: int
    num_models: np.ndarray
    coverage_mean: np.ndarray
    coverage_iqr25: np.ndarray
    coverage_iqr75: np.ndarray
    accuracy_mean: np.ndarray
    accuracy_iqr25: np.ndarray
    accuracy_iqr75: np.ndarray
    best_single_accuracy: float
    coverage_runs: np.ndarray
    accuracy_runs: np.ndarray


def selective_curve(rset: RashomonSet, strategy: str = "random", tau: float = 1.0,
                    repetitions: int = 50, rng_seed: int = 0,
                    members: Optional[Sequence[str]] = None,
                    max_models: Optional[int] = None) -> SelectiveCurve:
    """Coverage and accuracy-on-covered as models are added."""
    rule = ConsensusRule(tau)
    orders, reps = _orders(rset, strategy, repetitions, rng_seed, members)
    if max_models is not None:
        orders = [o[:max_models] for o in orders]
    truth = rset.truth_codes
    cov_runs, acc_runs = [], []
    for o in orders:
        decisions = _consensus_path(rset.codes[o], rule.tau)
        covered = decisions != ABSTAIN
        n_covered = covered.sum(axis=1)
        n_correct = (covered & (decisions == truth[None, :])).sum(axis=1)
        cov_runs.append(n_covered / rset.n_samples)
        with np.errstate(invalid="ignore", divide="ignore"):
            acc_runs.append(np.where(n_covered > 0, n_correct / np.maximum(n_covered, 1), np.nan))
    cov_runs = np.array(cov_runs)
    acc_runs = np.array(acc_runs)
    cov = _summary(cov_runs)
    acc = _summary(acc_runs)
    if reps == 1:
        cov = (cov_runs[0],) * 3
        acc = (acc_runs[0],) * 3
    best = float(np.max(np.mean(rset.codes == truth[None, :], axis=1)))
    return SelectiveCurve(
        strategy="members" if members is not None else strategy,
        tau=rule.tau, repetitions=reps, rng_seed=int(rng_seed),
        num_models=np.arange(1, cov_runs.shape[1] + 1),
        coverage_mean=cov[0], coverage_iqr25=cov[1], coverage_iqr75=cov[2],
        accuracy_mean=acc[0], accuracy_iqr25=acc[1], accuracy_iqr75=acc[2],
        best_single_accuracy=best, coverage_runs=cov_runs, accuracy_runs=acc_runs)
