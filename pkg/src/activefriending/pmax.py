"""Relative-error estimation of p_max with a sequential stopping rule.

Traces are drawn in index order until ``upsilon`` type-1 traces have been
seen; the estimate is ``upsilon / i`` where ``i`` is the index of the
``upsilon``-th success.  Blocks of traces are generated ahead of need but the
count is truncated at the exact success index, so the result equals the
one-at-a-time sequential rule on the same stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PMaxTooSmall
from .realization import sample_types
from .rng import BLOCK_SIZE

# max_samples default certifies p_max >= PMAX_FLOOR
PMAX_FLOOR = 0.01


def upsilon(epsilon0, n_big):
    """Number of type-1 traces the stopping rule waits for.

    ``ceil(1 + 4(e - 2)(1 + eps0) ln(2N) / eps0^2)``; the failure probability
    of the estimate is ``1/N``.
    """
    if not 0.0 < epsilon0 <= 1.0:
        raise ParameterError(f"epsilon0 must lie in (0, 1], got {epsilon0}")
    if n_big < 3:
        raise ParameterError(f"N must be >= 3, got {n_big}")
    return math.ceil(1.0 + 4.0 * (math.e - 2.0) * (1.0 + epsilon0) * math.log(2.0 * n_big) / epsilon0**2)


def default_max_samples(epsilon0, n_big):
    return int(100 * upsilon(epsilon0, n_big) / PMAX_FLOOR)


@dataclass(frozen=True)
class PmaxEstimate:
    p_star: float
    upsilon: int
    total_samples: int
    epsilon0: float
    failure_budget: float


def stopping_rule_estimate(instance, epsilon0, n_big, max_samples=None, seed=0):
    """Estimate p_max to relative error ``epsilon0`` with probability ``1 - 1/N``.

    Raises :class:`PMaxTooSmall` if ``max_samples`` traces do not contain
    ``upsilon`` type-1 traces.
    """
    ups = upsilon(epsilon0, n_big)
    if max_samples is None:
        max_samples = default_max_samples(epsilon0, n_big)
    if max_samples < 1:
        raise ParameterError("max_samples must be >= 1")
    seen = 0
    block = 0
    while block * BLOCK_SIZE < max_samples:
        y = sample_types(instance, block, seed)
        limit = min(BLOCK_SIZE, max_samples - block * BLOCK_SIZE)
        y = y[:limit]
        hits = int(np.count_nonzero(y))
        if seen + hits >= ups:
            idx = np.flatnonzero(y)[ups - seen - 1]
            total = block * BLOCK_SIZE + int(idx) + 1
            return PmaxEstimate(ups / total, ups, total, float(epsilon0), 1.0 / n_big)
        seen += hits
        block += 1
    raise PMaxTooSmall(ups / max_samples, max_samples)
