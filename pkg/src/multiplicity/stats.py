"""Independent-error baselines and summary statistics.

If models erred independently with accuracy ``p``, ``M`` models would all be
right on a sample with probability ``p**M`` and each model's accuracy on
``n`` samples would be ``Binomial(n, p) / n``.  Comparing observed ambiguity
and accuracy spread against these baselines reveals correlated errors.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import EmptyInput, InputError, InsufficientData, ZeroVariance
from .rng import stream


def analytic_ambiguity(p: float, n_models: int) -> float:
    """Ambiguity expected under independent errors, ``1 - p**M``.

    Ignores the chance that two wrong models pick the same wrong label, so
    it is an upper-bound style estimate for multiclass tasks.
    """
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    if n_models < 1:
        raise InputError("n_models must be at least 1")
    return float(1.0 - p ** int(n_models))


@dataclass(frozen=True)
class SimulatedAccuracySample:
    accuracies: np.ndarray
    p: float
    n_samples: int
    n_models: int
    rng_seed: int


def simulate_independent_accuracies(p: float, n_samples: int, n_models: int,
                                    rng_seed: int = 0) -> SimulatedAccuracySample:
    """Accuracies of ``n_models`` models with independent errors.

    Each model's number of correct predictions is ``Binomial(n_samples, p)``;
    model ``j`` draws from the stream ``(rng_seed, j)``.
    """
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    if n_samples < 1 or n_models < 1:
        raise InputError("n_samples and n_models must be positive")
    counts = np.array([stream(rng_seed, j).binomial(n_samples, p) for j in range(n_models)])
    acc = counts / n_samples
    acc.setflags(write=False)
    return SimulatedAccuracySample(acc, float(p), int(n_samples), int(n_models), int(rng_seed))


@dataclass(frozen=True)
class FTestResult:
    f_statistic: float
    p_value: float
    df_num: int
    df_den: int


def f_cdf(x: float, df_num: float, df_den: float) -> float:
    """CDF of the F distribution via the regularized incomplete beta function.

    ``P(F <= x) = I_{d1 x / (d1 x + d2)}(d1 / 2, d2 / 2)``, evaluated with
    :func:`scipy.special.betainc` (Cephes continued-fraction / power-series
    evaluation, accurate to ~1e-14).
    """
    if x <= 0:
        return 0.0
    if np.isinf(x):
        return 1.0
    z = df_num * x / (df_num * x + df_den)
    return float(special.betainc(df_num / 2.0, df_den / 2.0, z))


def f_sf(x: float, df_num: float, df_den: float) -> float:
    """Upper tail ``P(F >= x)``, computed directly to avoid cancellation."""
    if x <= 0:
        return 1.0
    if np.isinf(x):
        return 0.0
    w = df_den / (df_den + df_num * x)
    return float(special.betainc(df_den / 2.0, df_num / 2.0, w))


def f_test_variance(sample_a, sample_b) -> FTestResult:
    """Two-sided F-test for equal variances.

    The statistic is ``var(a) / var(b)`` with unbiased (``n - 1``) variances
    and degrees of freedom ``(len(a) - 1, len(b) - 1)``.  The p-value is twice
    the smaller tail probability, clipped to 1.

    Raises
    ------
    InsufficientData
        A sample has fewer than two values.
    ZeroVariance
        A sample has zero variance.
    """
    a = np.asarray(sample_a, dtype=np.float64).ravel()
    b = np.asarray(sample_b, dtype=np.float64).ravel()
    if a.size < 2 or b.size < 2:
        raise InsufficientData("each sample needs at least two values")
    var_a = float(np.var(a, ddof=1))
    var_b = float(np.var(b, ddof=1))
    if var_b == 0.0 or var_a == 0.0:
        raise ZeroVariance("both samples need non-zero variance")
    df_num, df_den = a.size - 1, b.size - 1
    f = var_a / var_b
    lower = f_cdf(f, df_num, df_den)
    upper = f_sf(f, df_num, df_den)
    p_value = min(1.0, 2.0 * min(lower, upper))
    # the tails are accurate to ~1e-14; a statistic at the median gives exactly 1
    if p_value > 1.0 - 1e-12:
        p_value = 1.0
    return FTestResult(f, max(0.0, p_value), df_num, df_den)


def independent_agreement_oracle(p: float, num_classes: int, mode: str = "closed_form",
                                 rng_seed: int = 0, n_draws: int = 200_000) -> float:
    """Expected agreement of two models with independent errors.

    Each model is right with probability ``p`` and otherwise picks one of the
    ``K - 1`` wrong labels uniformly, giving ``p**2 + (1 - p)**2 / (K - 1)``.
    ``mode="monte_carlo"`` estimates the same quantity from ``n_draws``
    simulated samples.
    """
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    if num_classes < 2:
        raise InputError("num_classes must be at least 2")
    if mode == "closed_form":
        return float(p * p + (1.0 - p) ** 2 / (num_classes - 1))
    if mode != "monte_carlo":
        raise InputError(f"unknown mode {mode!r}")
    rng = stream(rng_seed)
    truth = rng.integers(num_classes, size=n_draws)
    preds = []
    for _ in range(2):
        wrong = rng.random(n_draws) >= p
        shift = rng.integers(1, num_classes, size=n_draws)
        preds.append(np.where(wrong, (truth + shift) % num_classes, truth))
    return float(np.mean(preds[0] == preds[1]))


Summary = namedtuple("Summary", ["mean", "std", "iqr25", "iqr75"])


def summarize(values) -> Summary:
    """Mean, population standard deviation and linear 25/75 percentiles."""
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise EmptyInput("cannot summarize an empty sequence")
    q25, q75 = np.percentile(values, [25, 75])
    return Summary(float(values.mean()), float(values.std()), float(q25), float(q75))
