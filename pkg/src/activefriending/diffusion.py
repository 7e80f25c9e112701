"""The threshold friending process and estimators of the acceptance probability f(I)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .realization import FriendingOutcome, sample_batch, trace_distribution
from .rng import block_rng, blocks

Z95 = 1.959963984540054
# below this many successes (or failures) the Wilson interval replaces the normal one
WILSON_BELOW = 10


class Method(str, enum.Enum):
    THRESHOLDS = "thresholds"
    TRACES = "traces"
    EXACT = "exact"


@dataclass(frozen=True)
class FEstimate:
    mean: float
    samples: int
    half_width: float
    method: Method
    successes: int | None = None

    @classmethod
    def from_counts(cls, successes, samples, method):
        return cls(successes / samples, samples, half_width(successes, samples), Method(method), successes)

    @property
    def lower(self):
        return max(0.0, self.mean - self.half_width)


def half_width(successes, samples, z=Z95):
    """95% half-width for a binomial proportion."""
    p = successes / samples
    if min(successes, samples - successes) < WILSON_BELOW:
        denom = 1.0 + z * z / samples
        return z * math.sqrt(p * (1.0 - p) / samples + z * z / (4.0 * samples * samples)) / denom
    return z * math.sqrt(p * (1.0 - p) / samples)


def forward_process1(instance, thresholds, invited):
    """Run the threshold friending process for fixed thresholds.

    Starting from ``C = N_s``, every round befriends each invited non-friend
    ``u`` with ``sum_{v in C} w(v, u) >= thresholds[u]``.  Stops when no one
    joins or ``t`` joins.
    """
    inv = instance.check_invitation(invited)
    g = instance.graph
    friends = set(instance.seed_set)
    rounds = 0
    while True:
        joining = [u for u in sorted(inv - friends)
                   if sum(g.weight(v, u) for v in g.neighbors(u).tolist() if v in friends) >= thresholds[u]]
        if not joining:
            break
        rounds += 1
        friends.update(joining)
        if instance.t in friends:
            break
    return FriendingOutcome(instance.t in friends, frozenset(friends), rounds)


def estimate_f_thresholds(instance, invited, num_samples, seed):
    """Monte Carlo f(I) by simulating the process under uniform random thresholds.

    Only thresholds of invited nodes matter; block ``b`` of samples draws a
    ``(block, |I|)`` uniform matrix (columns in sorted node order).
    """
    inv = np.array(sorted(instance.check_invitation(invited)), dtype=np.int64)
    num_samples = int(num_samples)
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    if instance.t not in set(inv.tolist()):
        return FEstimate.from_counts(0, num_samples, Method.THRESHOLDS)
    g = instance.graph
    seeds = np.array(sorted(instance.seed_set), dtype=np.int64)
    hits = 0
    for b, lo, hi in blocks(num_samples):
        thetas = block_rng(seed, b).random((hi - lo, len(inv)))
        hits += _kernels.cascade_block(thetas, inv, seeds, g.indptr, g.indices, g.weights,
                                       g.mirror, instance.t, g.n)
    return FEstimate.from_counts(int(hits), num_samples, Method.THRESHOLDS)


def estimate_f_traces(instance, invited, num_samples, seed, workers=None):
    """Monte Carlo f(I) as the fraction of sampled traces covered by ``I``."""
    inv = instance.check_invitation(invited)
    num_samples = int(num_samples)
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    batch = sample_batch(instance, num_samples, seed, workers=workers)
    return FEstimate.from_counts(batch.covered_count(inv), num_samples, Method.TRACES)


def exact_f(instance, invited, distribution=None):
    """Exact f(I) summed over all realizations.

    ``distribution`` may carry a precomputed :func:`trace_distribution` to
    amortise enumeration across many invitation sets.
    """
    inv = instance.check_invitation(invited)
    if distribution is None:
        distribution = trace_distribution(instance, "enumerate")
    mean = math.fsum(p for tr, p in distribution.items() if tr.covered_by(inv))
    return FEstimate(min(1.0, mean), 0, 0.0, Method.EXACT)


def exact_pmax(instance, distribution=None):
    """Exact type-1 probability mass, i.e. f(candidates)."""
    if distribution is None:
        distribution = trace_distribution(instance, "enumerate")
    return min(1.0, math.fsum(p for tr, p in distribution.items() if tr.y == 1))
