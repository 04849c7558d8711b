"""Vote counting and the consensus-with-abstention rule.

Both the ambiguity metrics and the ensembles reduce to one question per
sample: do at least ``ceil(tau * M)`` of the ``M`` considered models emit the
same prediction, and is that prediction the unique most voted one?
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TauOutOfRange

ABSTAIN = -1


def required_votes(tau: float, n_members: int) -> int:
    """Smallest vote count that satisfies ``count >= tau * n_members``.

    The product is rounded to 9 decimals before taking the ceiling so that
    e.g. ``0.7 * 10`` (which is ``7.000000000000001`` in binary floating
    point) requires 7 votes, not 8.
    """
    return max(1, math.ceil(round(tau * n_members, 9)))


@dataclass(frozen=True)
class ConsensusRule:
    """Agreement threshold for predict-versus-abstain decisions.

    ``tau = 1`` is unanimity.  Values must lie in (0.5, 1] so that at most
    one label can reach the threshold.
    """

    tau: float = 1.0

    def __post_init__(self):
        tau = float(self.tau)
        if not (0.5 < tau <= 1.0):
            raise TauOutOfRange(f"consensus threshold must lie in (0.5, 1], got {tau}")
        object.__setattr__(self, "tau", tau)

    @property
    def unanimity(self) -> bool:
        return self.tau == 1.0

    def required_votes(self, n_members: int) -> int:
        return required_votes(self.tau, n_members)


UNANIMITY = ConsensusRule(1.0)


def vote_counts(codes: np.ndarray):
    """Per-sample vote counts of an ``(M, N)`` code matrix.

    Returns ``(values, counts)`` where ``values`` holds the distinct codes and
    ``counts[u, i]`` the number of models predicting ``values[u]`` on sample i.
    """
    values, inverse = np.unique(codes, return_inverse=True)
    inverse = inverse.reshape(codes.shape)
    counts = np.zeros((values.size, codes.shape[1]), dtype=np.int64)
    columns = np.broadcast_to(np.arange(codes.shape[1]), codes.shape)
    np.add.at(counts, (inverse, columns), 1)
    return values, counts


def modal_votes(counts: np.ndarray):
    """Top vote count per sample and whether the top label is unique."""
    top = counts.max(axis=0)
    unique = (counts == top).sum(axis=0) == 1
    return top, unique


def consensus(codes: np.ndarray, tau: float = 1.0) -> np.ndarray:
    """Ensemble prediction per sample, :data:`ABSTAIN` where consensus fails.

    ``codes`` is ``(M, N)`` with non-negative entries.
    """
    codes = np.asarray(codes)
    n_members = codes.shape[0]
    if tau == 1.0:
        agree = np.all(codes == codes[0], axis=0)
        return np.where(agree, codes[0], ABSTAIN)
    values, counts = vote_counts(codes)
    top, unique = modal_votes(counts)
    ok = (top >= required_votes(tau, n_members)) & unique
    return np.where(ok, values[np.argmax(counts, axis=0)], ABSTAIN)
