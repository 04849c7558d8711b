import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from multiplicity import GroundTruth, ModelRecord, PredictionMatrix, build_rashomon_set  # noqa: E402
from multiplicity.core import LABELS  # noqa: E402

ACCEPTANCE_RESULTS = []


def make_set(rows, truth=None, num_classes=None, val_metrics=None, ids=None):
    """Label-mode set from a list of prediction rows."""
    rows = np.asarray(rows, dtype=np.int64)
    n_models, n_samples = rows.shape[:2]
    if truth is None:
        truth = rows[0]
    truth = np.asarray(truth, dtype=np.int64)
    multilabel = rows.ndim == 3
    if num_classes is None:
        num_classes = rows.shape[2] if multilabel else max(2, int(max(rows.max(), truth.max())) + 1)
    ids = ids or [f"m{j:02d}" for j in range(n_models)]
    sample_ids = [f"s{i:03d}" for i in range(n_samples)]
    if val_metrics is None:
        val_metrics = [None] * n_models
    records = [ModelRecord(ids[j], j, val_metrics[j]) for j in range(n_models)]
    preds = PredictionMatrix(LABELS, rows, ids, sample_ids, multilabel, num_classes)
    return build_rashomon_set(records, preds, GroundTruth(truth, num_classes, sample_ids))


def random_instance(rng, max_models=8, max_samples=50, max_classes=5):
    n_models = int(rng.integers(1, max_models + 1))
    n_samples = int(rng.integers(1, max_samples + 1))
    k = int(rng.integers(2, max_classes + 1))
    rows = rng.integers(k, size=(n_models, n_samples))
    truth = rng.integers(k, size=n_samples)
    return rows, truth, k


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log():
    def log(number, passed, detail):
        ACCEPTANCE_RESULTS.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
    return log
