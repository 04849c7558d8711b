"""Reading and writing prediction logs, ground truth and model metadata.

All files are UTF-8, comma-separated, with a header row and LF line endings.

* predictions: ``model_id,sample_id,pred`` (labels),
  ``model_id,sample_id,pred_0,...,pred_{L-1}`` (multi-label labels) or
  ``model_id,sample_id,score_0,...,score_{K-1}`` (scores); one row per
  (model, sample) pair.
* ground truth: ``sample_id,label`` or ``sample_id,y_0,...,y_{L-1}``.
* metadata: ``model_id,seed,val_metric[,test_metric]``.
"""

from __future__ import annotations

import csv
import hashlib
import io
from pathlib import Path
from typing import Optional

import numpy as np

from .core import (
    LABELS,
    SCORES,
    GroundTruth,
    ModelRecord,
    PredictionMatrix,
    RashomonSet,
    build_rashomon_set,
    threshold_scores,
)
from .errors import InputError, MultiplicityError, ParseError


def fmt(value) -> str:
    """Shortest round-tripping text for a number; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if np.isnan(value):
        return "nan"
    return repr(value)


def write_csv(path, header, rows) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([c if isinstance(c, str) else fmt(c) for c in row])
    Path(path).write_text(buffer.getvalue(), encoding="utf-8", newline="")


def _rows(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError("file not found", path) from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 ({exc.reason})", path) from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file", path) from None
    header = [h.strip() for h in header]
    rows = []
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, reader.line_num)
        rows.append((reader.line_num, [c.strip() for c in row]))
    return path, header, rows


def _indexed_columns(header, prefix):
    cols = header[2:] if header[:2] == ["model_id", "sample_id"] else header[1:]
    expected = [f"{prefix}{j}" for j in range(len(cols))]
    return len(cols) if cols == expected else None


def _parse_number(text, path, line, what):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{what} {text!r} is not a number", path, line) from None
    return value


def _parse_int(text, path, line, what):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{what} {text!r} is not an integer", path, line) from None


def read_predictions(path, multilabel: bool = False,
                     num_classes: Optional[int] = None) -> PredictionMatrix:
    """Parse a prediction log into a dense :class:`PredictionMatrix`.

    Models and samples keep their order of first appearance.  Every
    (model, sample) pair must occur exactly once.  ``multilabel`` marks
    score columns as independent targets rather than class probabilities.
    """
    path, header, rows = _rows(path)
    if header[:2] != ["model_id", "sample_id"] or len(header) < 3:
        raise ParseError("header must start with model_id,sample_id", path, 1)
    if header[2:] == ["pred"]:
        mode, width = LABELS, None
    elif _indexed_columns(header, "pred_"):
        mode, width, multilabel = LABELS, len(header) - 2, True
    elif _indexed_columns(header, "score_"):
        mode, width = SCORES, len(header) - 2
    else:
        raise ParseError(
            "value columns must be 'pred', 'pred_0..pred_{L-1}' or 'score_0..score_{K-1}'", path, 1)

    model_pos, sample_pos, cells = {}, {}, {}
    for line, row in rows:
        model_id, sample_id = row[0], row[1]
        if not model_id or not sample_id:
            raise ParseError("empty model_id or sample_id", path, line)
        key = (model_pos.setdefault(model_id, len(model_pos)),
               sample_pos.setdefault(sample_id, len(sample_pos)))
        if key in cells:
            raise ParseError(
                f"duplicate row for model {model_id!r}, sample {sample_id!r} "
                f"(first on line {cells[key][0]})", path, line)
        if mode == LABELS and width is None:
            value = _parse_int(row[2], path, line, "label")
            if value < 0:
                raise ParseError(f"label {value} is negative", path, line)
        elif mode == LABELS:
            value = [_parse_int(c, path, line, "label") for c in row[2:]]
            if any(v not in (0, 1) for v in value):
                raise ParseError("multi-label predictions must be 0 or 1", path, line)
        else:
            value = [_parse_number(c, path, line, "score") for c in row[2:]]
            if not all(np.isfinite(v) and 0.0 <= v <= 1.0 for v in value):
                raise ParseError(f"score outside [0, 1] in row {row}", path, line)
        cells[key] = (line, value)

    model_ids = list(model_pos)
    sample_ids = list(sample_pos)
    if len(cells) != len(model_ids) * len(sample_ids):
        for m, model_id in enumerate(model_ids):
            for s, sample_id in enumerate(sample_ids):
                if (m, s) not in cells:
                    raise ParseError(
                        f"missing prediction of model {model_id!r} for sample {sample_id!r}", path)
    if not model_ids:
        raise ParseError("no prediction rows", path)
    shape = (len(model_ids), len(sample_ids)) + (() if width is None else (width,))
    entries = np.zeros(shape, dtype=np.int64 if mode == LABELS else np.float64)
    for (m, s), (_, value) in cells.items():
        entries[m, s] = value
    try:
        return PredictionMatrix(mode, entries, model_ids, sample_ids, multilabel, num_classes)
    except MultiplicityError as exc:
        raise ParseError(str(exc), path) from None


def read_ground_truth(path, num_classes: Optional[int] = None) -> GroundTruth:
    """Parse a ground-truth file.

    For single-label files ``num_classes`` defaults to ``max(label) + 1``
    (at least 2).
    """
    path, header, rows = _rows(path)
    if not header or header[0] != "sample_id" or len(header) < 2:
        raise ParseError("header must start with sample_id", path, 1)
    multilabel = header[1:] != ["label"]
    if multilabel and not _indexed_columns(header, "y_"):
        raise ParseError("columns must be 'label' or 'y_0..y_{L-1}'", path, 1)
    seen, sample_ids, labels = {}, [], []
    for line, row in rows:
        if row[0] in seen:
            raise ParseError(f"duplicate sample_id {row[0]!r} (first on line {seen[row[0]]})",
                             path, line)
        seen[row[0]] = line
        values = [_parse_int(c, path, line, "label") for c in row[1:]]
        if any(v < 0 for v in values) or (multilabel and any(v > 1 for v in values)):
            raise ParseError(f"invalid label(s) {row[1:]}", path, line)
        sample_ids.append(row[0])
        labels.append(values if multilabel else values[0])
    if not rows:
        raise ParseError("no ground-truth rows", path)
    labels = np.array(labels, dtype=np.int64)
    if multilabel:
        num_classes = labels.shape[1]
    elif num_classes is None:
        num_classes = max(2, int(labels.max()) + 1)
    try:
        return GroundTruth(labels, num_classes, sample_ids)
    except MultiplicityError as exc:
        raise ParseError(str(exc), path) from None


def read_metadata(path) -> list:
    """Parse model metadata into :class:`ModelRecord` objects."""
    path, header, rows = _rows(path)
    if header[:3] != ["model_id", "seed", "val_metric"] or len(header) > 4 or (
            len(header) == 4 and header[3] != "test_metric"):
        raise ParseError("header must be model_id,seed,val_metric[,test_metric]", path, 1)
    records, seen = [], {}
    for line, row in rows:
        if row[0] in seen:
            raise ParseError(f"duplicate model_id {row[0]!r} (first on line {seen[row[0]]})",
                             path, line)
        seen[row[0]] = line
        seed = _parse_int(row[1], path, line, "seed")
        metrics = [None if c == "" else _parse_number(c, path, line, "metric") for c in row[2:]]
        try:
            records.append(ModelRecord(row[0], seed, *metrics))
        except MultiplicityError as exc:
            raise ParseError(str(exc), path, line) from None
    return records


def read_values(path) -> np.ndarray:
    """First column of a one-header numeric file (e.g. simulated accuracies)."""
    path, header, rows = _rows(path)
    return np.array([_parse_number(row[0], path, line, header[0]) for line, row in rows])


def read_points(path) -> np.ndarray:
    """``(n, 2)`` array from the first two columns of a header-bearing file."""
    path, header, rows = _rows(path)
    if len(header) < 2:
        raise ParseError("points file needs two columns", path, 1)
    return np.array([[_parse_number(row[0], path, line, header[0]),
                      _parse_number(row[1], path, line, header[1])] for line, row in rows])


def write_predictions(predictions: PredictionMatrix, path) -> None:
    entries = predictions.entries
    if predictions.mode == SCORES:
        columns = [f"score_{j}" for j in range(entries.shape[2])]
    elif predictions.multilabel:
        columns = [f"pred_{j}" for j in range(entries.shape[2])]
    else:
        columns = ["pred"]
    rows = []
    for m, model_id in enumerate(predictions.model_ids):
        for s, sample_id in enumerate(predictions.sample_ids):
            cell = entries[m, s]
            values = [cell] if entries.ndim == 2 else list(cell)
            rows.append([model_id, sample_id] + [fmt(v.item()) for v in values])
    write_csv(path, ["model_id", "sample_id"] + columns, rows)


def write_ground_truth(truth: GroundTruth, path) -> None:
    if truth.multilabel:
        header = ["sample_id"] + [f"y_{j}" for j in range(truth.num_classes)]
        rows = [[s] + [int(v) for v in truth.labels[i]] for i, s in enumerate(truth.sample_ids)]
    else:
        header = ["sample_id", "label"]
        rows = [[s, int(truth.labels[i])] for i, s in enumerate(truth.sample_ids)]
    write_csv(path, header, rows)


def write_metadata(records, path) -> None:
    with_test = any(r.test_metric is not None for r in records)
    header = ["model_id", "seed", "val_metric"] + (["test_metric"] if with_test else [])
    rows = []
    for r in records:
        row = [r.model_id, r.seed, fmt(r.val_metric)]
        if with_test:
            row.append(fmt(r.test_metric))
        rows.append(row)
    write_csv(path, header, rows)


def write_rashomon_set(rset: RashomonSet, directory) -> dict:
    """Write a set as ``predictions.csv``, ``truth.csv``, ``metadata.csv``
    (+ ``val_predictions.csv``, ``val_truth.csv``) and return the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "predictions": directory / "predictions.csv",
        "truth": directory / "truth.csv",
        "metadata": directory / "metadata.csv",
    }
    write_predictions(rset.test_predictions, paths["predictions"])
    write_ground_truth(rset.ground_truth_test, paths["truth"])
    write_metadata(rset.records, paths["metadata"])
    if rset.val_predictions is not None:
        paths["val_predictions"] = directory / "val_predictions.csv"
        paths["val_truth"] = directory / "val_truth.csv"
        write_predictions(rset.val_predictions, paths["val_predictions"])
        write_ground_truth(rset.ground_truth_val, paths["val_truth"])
    return paths


def load_rashomon_set(predictions, truth, metadata, val_predictions=None, val_truth=None,
                      num_classes: Optional[int] = None, threshold: float = 0.5):
    """Read files into a label-mode set, plus the score-mode set when scores were given.

    Score predictions are thresholded with :func:`threshold_scores`.  Returns
    ``(label_set, score_set_or_None)``.
    """
    if (val_predictions is None) != (val_truth is None):
        raise InputError("validation predictions and truth must be given together")
    gt = read_ground_truth(truth, num_classes)
    pm = read_predictions(predictions, gt.multilabel, gt.num_classes).align_samples(gt.sample_ids)
    records = read_metadata(metadata)
    val_pm = val_gt = None
    if val_predictions is not None:
        val_gt = read_ground_truth(val_truth, gt.num_classes if not gt.multilabel else None)
        val_pm = read_predictions(val_predictions, val_gt.multilabel,
                                  val_gt.num_classes).align_samples(val_gt.sample_ids)
    score_set = None
    if pm.mode == SCORES:
        score_set = build_rashomon_set(records, pm, gt, val_pm, val_gt)
        pm = threshold_scores(pm, threshold)
        if val_pm is not None and val_pm.mode == SCORES:
            val_pm = threshold_scores(val_pm, threshold)
    elif val_pm is not None and val_pm.mode == SCORES:
        val_pm = threshold_scores(val_pm, threshold)
    return build_rashomon_set(records, pm, gt, val_pm, val_gt), score_set


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
