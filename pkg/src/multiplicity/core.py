"""Data model for prediction sets, ground truth and model metadata.

Every analysis in this package works on a :class:`RashomonSet`: an ordered
collection of models, their test (and optionally validation) predictions and
the matching ground truth.  Predictions are stored as dense arrays of shape
``(n_models, n_samples)`` for single-label tasks, ``(n_models, n_samples, L)``
for multi-label tasks and ``(n_models, n_samples, K)`` for probability scores.

For multi-label tasks the whole binary vector of length ``L`` is the unit of
prediction: two models agree on a sample only if all ``L`` entries match.
Internally such vectors are packed into a single integer "code" per cell so
that the single- and multi-label cases share one code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import (
    EmptySet,
    InputError,
    LabelOutOfRange,
    MisalignedIds,
    ModeMismatch,
    NotScoreMode,
    UnknownModelId,
)

LABELS = "labels"
SCORES = "scores"

# bit-packing of multi-label vectors into int64 codes
MAX_MULTILABEL_WIDTH = 62


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _check_unique(ids: Sequence[str], what: str) -> tuple:
    ids = tuple(str(i) for i in ids)
    if len(set(ids)) != len(ids):
        seen, dup = set(), []
        for i in ids:
            if i in seen:
                dup.append(i)
            seen.add(i)
        raise MisalignedIds(f"duplicate {what}: {sorted(set(dup))[:5]}")
    return ids


def _as_int_labels(values, what: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise LabelOutOfRange(f"{what} must be integers")
    arr = arr.astype(np.int64)
    if arr.size and arr.min() < 0:
        raise LabelOutOfRange(f"{what} must be non-negative")
    return arr


def pack_multilabel(vectors: np.ndarray) -> np.ndarray:
    """Pack binary vectors along the last axis into integer codes."""
    width = vectors.shape[-1]
    if width > MAX_MULTILABEL_WIDTH:
        raise InputError(f"multi-label width {width} exceeds {MAX_MULTILABEL_WIDTH}")
    weights = np.left_shift(np.int64(1), np.arange(width, dtype=np.int64))
    return (vectors.astype(np.int64) * weights).sum(axis=-1)


def unpack_multilabel(code: int, width: int) -> tuple:
    return tuple(int((int(code) >> j) & 1) for j in range(width))


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Reference labels for one data split.

    ``labels`` is a vector of class indices (single-label) or an ``(N, L)``
    binary matrix (multi-label, ``num_classes == L``).
    """

    labels: np.ndarray
    num_classes: int
    sample_ids: tuple

    def __post_init__(self):
        labels = _as_int_labels(self.labels, "ground-truth labels")
        if labels.ndim not in (1, 2):
            raise InputError("ground-truth labels must be 1-D or 2-D")
        ids = _check_unique(self.sample_ids, "sample_ids")
        if len(ids) != labels.shape[0]:
            raise MisalignedIds(
                f"{labels.shape[0]} labels but {len(ids)} sample_ids")
        k = int(self.num_classes)
        if k < 1:
            raise InputError("num_classes must be positive")
        if labels.ndim == 1:
            if labels.size and labels.max() >= k:
                bad = int(np.argmax(labels >= k))
                raise LabelOutOfRange(
                    f"label {labels[bad]} of sample {ids[bad]!r} >= num_classes {k}")
        else:
            if labels.shape[1] != k:
                raise InputError(
                    f"multi-label width {labels.shape[1]} != num_classes {k}")
            if labels.size and labels.max() > 1:
                raise LabelOutOfRange("multi-label targets must be 0/1")
        object.__setattr__(self, "labels", _frozen(labels))
        object.__setattr__(self, "num_classes", k)
        object.__setattr__(self, "sample_ids", ids)

    @property
    def multilabel(self) -> bool:
        return self.labels.ndim == 2

    @property
    def n_samples(self) -> int:
        return self.labels.shape[0]

    @cached_property
    def codes(self) -> np.ndarray:
        if self.multilabel:
            return pack_multilabel(self.labels)
        return self.labels

    def __eq__(self, other):
        if not isinstance(other, GroundTruth):
            return NotImplemented
        return (self.num_classes == other.num_classes
                and self.sample_ids == other.sample_ids
                and self.labels.shape == other.labels.shape
                and np.array_equal(self.labels, other.labels))

    __hash__ = object.__hash__


@dataclass(frozen=True, eq=False)
class PredictionMatrix:
    """Predictions of every model on every sample of one split.

    Parameters
    ----------
    mode : {"labels", "scores"}
    entries : array
        ``(M, N)`` class indices, ``(M, N, L)`` binary multi-label vectors, or
        ``(M, N, K)`` scores in [0, 1].
    model_ids, sample_ids : sequences of str
    multilabel : bool
        Whether the last axis holds independent binary targets.
    num_classes : int, optional
        Number of classes of the task.  Inferred when omitted (a single score
        column is a binary task).
    """

    mode: str
    entries: np.ndarray
    model_ids: tuple
    sample_ids: tuple
    multilabel: bool = False
    num_classes: Optional[int] = None

    def __post_init__(self):
        if self.mode not in (LABELS, SCORES):
            raise InputError(f"unknown prediction mode {self.mode!r}")
        model_ids = _check_unique(self.model_ids, "model_ids")
        sample_ids = _check_unique(self.sample_ids, "sample_ids")
        multilabel = bool(self.multilabel)
        if self.mode == LABELS:
            entries = _as_int_labels(self.entries, "predicted labels")
            expected_ndim = 3 if multilabel else 2
        else:
            entries = np.asarray(self.entries, dtype=np.float64)
            expected_ndim = 3
            if not np.all(np.isfinite(entries)):
                raise InputError("scores must be finite")
            if entries.size and (entries.min() < 0 or entries.max() > 1):
                raise InputError("scores must lie in [0, 1]")
        if entries.ndim != expected_ndim:
            raise InputError(
                f"{self.mode} entries must be {expected_ndim}-D, got shape {entries.shape}")
        if entries.shape[0] != len(model_ids) or entries.shape[1] != len(sample_ids):
            raise MisalignedIds(
                f"entries shape {entries.shape[:2]} does not match "
                f"{len(model_ids)} models x {len(sample_ids)} samples")
        num_classes = self.num_classes
        if num_classes is None:
            if entries.ndim == 3:
                num_classes = max(entries.shape[2], 2) if not multilabel else entries.shape[2]
            else:
                num_classes = int(entries.max()) + 1 if entries.size else 1
        num_classes = int(num_classes)
        if self.mode == LABELS and not multilabel and entries.size and entries.max() >= num_classes:
            raise LabelOutOfRange(
                f"predicted label {int(entries.max())} >= num_classes {num_classes}")
        if self.mode == LABELS and multilabel and entries.size and entries.max() > 1:
            raise LabelOutOfRange("multi-label predictions must be 0/1")
        object.__setattr__(self, "entries", _frozen(entries))
        object.__setattr__(self, "model_ids", model_ids)
        object.__setattr__(self, "sample_ids", sample_ids)
        object.__setattr__(self, "multilabel", multilabel)
        object.__setattr__(self, "num_classes", num_classes)

    @property
    def n_models(self) -> int:
        return self.entries.shape[0]

    @property
    def n_samples(self) -> int:
        return self.entries.shape[1]

    @cached_property
    def codes(self) -> np.ndarray:
        """``(M, N)`` integer prediction codes; label mode only."""
        if self.mode != LABELS:
            raise ModeMismatch("prediction codes require label mode; threshold scores first")
        if self.multilabel:
            return pack_multilabel(self.entries)
        return self.entries

    def decode(self, code: int):
        if self.multilabel:
            return unpack_multilabel(code, self.entries.shape[2])
        return int(code)

    def take_models(self, index) -> "PredictionMatrix":
        index = np.asarray(index, dtype=np.int64)
        return PredictionMatrix(
            self.mode, self.entries[index], [self.model_ids[i] for i in index],
            self.sample_ids, self.multilabel, self.num_classes)

    def align_samples(self, sample_ids: Sequence[str]) -> "PredictionMatrix":
        """Reorder columns to ``sample_ids``; the id sets must coincide."""
        sample_ids = tuple(sample_ids)
        if sample_ids == self.sample_ids:
            return self
        position = {s: i for i, s in enumerate(self.sample_ids)}
        missing = [s for s in sample_ids if s not in position]
        extra = sorted(set(self.sample_ids) - set(sample_ids))
        if missing or extra:
            parts = []
            if missing:
                parts.append(f"no predictions for sample_id(s) {missing[:5]}")
            if extra:
                parts.append(f"predictions for unknown sample_id(s) {extra[:5]}")
            raise MisalignedIds("; ".join(parts))
        index = np.array([position[s] for s in sample_ids], dtype=np.int64)
        return PredictionMatrix(
            self.mode, self.entries[:, index], self.model_ids, sample_ids,
            self.multilabel, self.num_classes)

    def __eq__(self, other):
        if not isinstance(other, PredictionMatrix):
            return NotImplemented
        return (self.mode == other.mode
                and self.model_ids == other.model_ids
                and self.sample_ids == other.sample_ids
                and self.multilabel == other.multilabel
                and self.num_classes == other.num_classes
                and self.entries.shape == other.entries.shape
                and np.array_equal(self.entries, other.entries))

    __hash__ = object.__hash__


@dataclass(frozen=True)
class ModelRecord:
    """Metadata of one trained model."""

    model_id: str
    seed: int
    val_metric: Optional[float] = None
    test_metric: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "model_id", str(self.model_id))
        object.__setattr__(self, "seed", int(self.seed))
        for name in ("val_metric", "test_metric"):
            value = getattr(self, name)
            if value is None:
                continue
            value = float(value)
            if not 0.0 <= value <= 1.0:
                raise InputError(f"{name} of model {self.model_id!r} must be in [0, 1], got {value}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True, eq=False)
class RashomonSet:
    """Validated collection of competing models and their predictions.

    Construct through :func:`build_rashomon_set`, which canonicalises the
    model order.
    """

    records: tuple
    test_predictions: PredictionMatrix
    ground_truth_test: GroundTruth
    val_predictions: Optional[PredictionMatrix] = None
    ground_truth_val: Optional[GroundTruth] = None
    _position: dict = field(init=False, repr=False)

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        if not records:
            raise EmptySet("a Rashomon set needs at least one model")
        ids = tuple(r.model_id for r in records)
        _check_unique(ids, "model_ids")
        _check_split(ids, self.test_predictions, self.ground_truth_test, "test")
        if self.val_predictions is not None or self.ground_truth_val is not None:
            if self.val_predictions is None or self.ground_truth_val is None:
                raise InputError("validation predictions and truth must be given together")
            _check_split(ids, self.val_predictions, self.ground_truth_val, "validation")
        object.__setattr__(self, "_position", {m: i for i, m in enumerate(ids)})

    @property
    def model_ids(self) -> tuple:
        return self.test_predictions.model_ids

    @property
    def n_models(self) -> int:
        return len(self.records)

    @property
    def n_samples(self) -> int:
        return self.test_predictions.n_samples

    @property
    def multilabel(self) -> bool:
        return self.ground_truth_test.multilabel

    def indices(self, model_ids) -> np.ndarray:
        """Row indices of ``model_ids`` (a single id or a sequence of ids)."""
        if isinstance(model_ids, str):
            model_ids = [model_ids]
        try:
            return np.array([self._position[str(m)] for m in model_ids], dtype=np.int64)
        except KeyError as exc:
            raise UnknownModelId(f"unknown model id {exc.args[0]!r}") from None

    @property
    def codes(self) -> np.ndarray:
        """Test-split prediction codes, ``(n_models, n_samples)``."""
        return self.test_predictions.codes

    @property
    def truth_codes(self) -> np.ndarray:
        return self.ground_truth_test.codes

    def decode(self, code: int):
        return self.test_predictions.decode(code)

    def val_metrics(self) -> np.ndarray:
        return np.array([np.nan if r.val_metric is None else r.val_metric
                         for r in self.records])

    def __eq__(self, other):
        if not isinstance(other, RashomonSet):
            return NotImplemented
        return (self.records == other.records
                and self.test_predictions == other.test_predictions
                and self.ground_truth_test == other.ground_truth_test
                and self.val_predictions == other.val_predictions
                and self.ground_truth_val == other.ground_truth_val)

    __hash__ = object.__hash__


def _check_split(model_ids, predictions: PredictionMatrix, truth: GroundTruth, split: str):
    if predictions.model_ids != model_ids:
        missing = sorted(set(model_ids) - set(predictions.model_ids))
        extra = sorted(set(predictions.model_ids) - set(model_ids))
        if missing or extra:
            raise MisalignedIds(
                f"{split} predictions: models without predictions {missing[:5]}, "
                f"predictions without metadata {extra[:5]}")
        raise MisalignedIds(f"{split} prediction model order differs from records")
    if predictions.sample_ids != truth.sample_ids:
        missing = [s for s in truth.sample_ids if s not in set(predictions.sample_ids)]
        extra = [s for s in predictions.sample_ids if s not in set(truth.sample_ids)]
        if missing or extra:
            raise MisalignedIds(
                f"{split} split: truth samples without predictions {missing[:5]}, "
                f"predicted samples without truth {extra[:5]}")
        raise MisalignedIds(f"{split} split: sample order differs from ground truth")
    if predictions.multilabel != truth.multilabel:
        raise ModeMismatch(f"{split} split: multi-label predictions require multi-label truth")
    if truth.multilabel and predictions.entries.shape[2] != truth.num_classes:
        raise ModeMismatch(
            f"{split} split: {predictions.entries.shape[2]} predicted targets, "
            f"{truth.num_classes} in ground truth")
    if predictions.mode == LABELS and not truth.multilabel:
        entries = predictions.entries
        if entries.size and entries.max() >= truth.num_classes:
            m, s = np.unravel_index(int(np.argmax(entries)), entries.shape)
            raise LabelOutOfRange(
                f"{split} split: model {predictions.model_ids[m]!r} predicts label "
                f"{int(entries[m, s])} on sample {predictions.sample_ids[s]!r}, "
                f"num_classes is {truth.num_classes}")
    if predictions.mode == SCORES and not truth.multilabel:
        k = predictions.entries.shape[2]
        if k > 1 and k != truth.num_classes:
            raise ModeMismatch(
                f"{split} split: {k} score columns for {truth.num_classes} classes")


def build_rashomon_set(records: Sequence[ModelRecord],
                       test_predictions: PredictionMatrix,
                       ground_truth_test: GroundTruth,
                       val_predictions: Optional[PredictionMatrix] = None,
                       ground_truth_val: Optional[GroundTruth] = None) -> RashomonSet:
    """Validate inputs and return a :class:`RashomonSet` ordered by model id.

    Raises
    ------
    EmptySet
        No models were given.
    MisalignedIds
        Model ids of records and predictions differ, or sample ids of
        predictions and ground truth differ.
    LabelOutOfRange
        A predicted label is not a valid class of the ground truth.
    """
    records = list(records)
    if not records or test_predictions.n_models == 0:
        raise EmptySet("a Rashomon set needs at least one model")
    record_ids = _check_unique([r.model_id for r in records], "record model_ids")
    order = sorted(range(len(records)), key=lambda i: record_ids[i])
    records = [records[i] for i in order]
    canonical = tuple(r.model_id for r in records)

    def _reorder(pm: Optional[PredictionMatrix], split: str):
        if pm is None:
            return None
        if set(pm.model_ids) != set(canonical) or len(pm.model_ids) != len(canonical):
            missing = sorted(set(canonical) - set(pm.model_ids))
            extra = sorted(set(pm.model_ids) - set(canonical))
            raise MisalignedIds(
                f"{split} predictions: models without predictions {missing[:5]}, "
                f"predictions without metadata {extra[:5]}")
        position = {m: i for i, m in enumerate(pm.model_ids)}
        return pm.take_models([position[m] for m in canonical])

    return RashomonSet(
        records=tuple(records),
        test_predictions=_reorder(test_predictions, "test"),
        ground_truth_test=ground_truth_test,
        val_predictions=_reorder(val_predictions, "validation"),
        ground_truth_val=ground_truth_val,
    )


def threshold_scores(scores: PredictionMatrix, tau: float = 0.5) -> PredictionMatrix:
    """Turn a score matrix into hard labels.

    Multi-label and binary tasks call a class positive iff its score is
    ``>= tau`` (a score equal to the threshold is positive).  A binary task
    is one with a single score column, or two columns in which case the
    second column is the positive-class score.  Multiclass tasks take the
    argmax, breaking ties towards the lowest class index; ``tau`` is unused
    there.
    """
    if scores.mode != SCORES:
        raise NotScoreMode("threshold_scores expects a score-mode matrix")
    if not 0.0 < tau < 1.0:
        raise InputError(f"threshold must lie in (0, 1), got {tau}")
    entries = scores.entries
    k = entries.shape[2]
    if scores.multilabel:
        labels = (entries >= tau).astype(np.int64)
        num_classes = k
    elif k == 1:
        labels = (entries[:, :, 0] >= tau).astype(np.int64)
        num_classes = 2
    elif k == 2:
        labels = (entries[:, :, 1] >= tau).astype(np.int64)
        num_classes = 2
    else:
        # np.argmax returns the first maximum, i.e. the lowest index on ties
        labels = np.argmax(entries, axis=2).astype(np.int64)
        num_classes = k
    return PredictionMatrix(LABELS, labels, scores.model_ids, scores.sample_ids,
                            scores.multilabel, num_classes)
