"""High-degree (HD) and successive-shortest-path (SP) invitation baselines.

Both strategies produce an ordered list of candidates starting with ``t``;
the budget-``k`` invitation set is the first ``k`` entries, so larger budgets
always extend smaller ones.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .diffusion import FEstimate
from .realization import Terminal, sample_batch


class Strategy(str, enum.Enum):
    HD = "hd"
    SP = "sp"


@dataclass(frozen=True)
class Selection:
    """An invitation set together with the order it was filled in.

    ``clipped``: the budget exceeded the candidate count.  ``padded``: SP ran
    out of disjoint paths and filled the rest by degree.
    """

    order: tuple
    clipped: bool = False
    padded: bool = False

    @property
    def nodes(self):
        return frozenset(self.order)

    def __len__(self):
        return len(self.order)


def degree_order(instance):
    """Candidates other than ``t`` by decreasing degree, ties to the smaller id."""
    deg = instance.graph.degree()
    rest = [v for v in instance.candidates if v != instance.t]
    return sorted(rest, key=lambda v: (-int(deg[v]), v))


def hd(instance, k):
    """``t`` plus the ``k - 1`` highest-degree other candidates."""
    if k < 1:
        raise ValueError("budget k must be >= 1")
    clipped = k > len(instance.candidates)
    order = (instance.t, *degree_order(instance))
    return Selection(order[:k], clipped=clipped)


def _bfs_path(graph, s, t, blocked, skip_edges):
    parent = {s: None}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in graph.neighbors(u).tolist():
            if v in parent or v in blocked or (u, v) in skip_edges:
                continue
            parent[v] = u
            if v == t:
                path = [t]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(v)
    return None


def path_order(instance):
    """Candidates in the order successive disjoint shortest paths reveal them.

    Each round takes a hop-shortest ``s -> t`` path (BFS, neighbours in
    increasing id) avoiding candidate nodes used by earlier paths; ``s``,
    ``N_s`` and ``t`` may be shared.  A path with no candidate interior (``t``
    next to ``N_s``) contributes nothing and disables the direct
    ``N_s``-``t`` edges for later rounds.
    """
    g = instance.graph
    s, t = instance.s, instance.t
    used = set()
    skip = set()
    order = []
    while True:
        path = _bfs_path(g, s, t, used, skip)
        if path is None:
            return order
        interior = [v for v in path[1:-1] if v in instance.candidates]
        if not interior:
            for u in instance.seed_set:
                skip.add((u, t))
            continue
        order.extend(interior)
        used.update(interior)


def sp(instance, k):
    """``t`` plus nodes of successive vertex-disjoint shortest paths, up to ``k`` nodes."""
    if k < 1:
        raise ValueError("budget k must be >= 1")
    order = [instance.t, *path_order(instance)]
    padded = False
    if len(order) < k:
        padded = True
        seen = set(order)
        order.extend(v for v in degree_order(instance) if v not in seen)
    return Selection(tuple(order[:k]), clipped=k > len(instance.candidates), padded=padded)


def strategy_selection(instance, strategy, k):
    return hd(instance, k) if Strategy(strategy) is Strategy.HD else sp(instance, k)


@dataclass(frozen=True)
class GrowResult:
    selection: Selection
    k: int
    estimate: FEstimate
    reached: bool
    curve: np.ndarray  # estimated f for budgets 1..k_cap


def grow_until(instance, strategy, f_target, eval_samples, k_cap, seed):
    """Smallest budget whose strategy set reaches ``f_target``.

    A budget counts as reaching the target when the estimated f is at least
    ``f_target`` minus its half-width.  Every budget is scored on the same
    ``eval_samples`` traces drawn with ``seed``, so the scores are exactly
    those of :func:`~activefriending.diffusion.estimate_f_traces` with that
    seed.
    """
    if k_cap < 1:
        raise ValueError("k_cap must be >= 1")
    full = strategy_selection(instance, strategy, min(k_cap, len(instance.candidates)))
    full = Selection(full.order, k_cap > len(instance.candidates), full.padded)
    k_cap = len(full)
    order = full.order[:k_cap]
    rank = np.full(instance.graph.n, k_cap + 1, dtype=np.int64)
    rank[list(order)] = np.arange(1, len(order) + 1)
    batch = sample_batch(instance, eval_samples, seed)
    need = _kernels.max_rank(batch.offsets, batch.nodes, rank,
                             batch.terminal == Terminal.REACHED_SEED)
    need = need[need > 0]
    hits = np.bincount(need, minlength=k_cap + 2)[1:k_cap + 1].cumsum()
    curve = hits / eval_samples
    for k in range(1, k_cap + 1):
        est = FEstimate.from_counts(int(hits[k - 1]), eval_samples, "traces")
        if est.mean >= f_target - est.half_width:
            return GrowResult(strategy_selection(instance, strategy, k), k, est, True, curve)
    est = FEstimate.from_counts(int(hits[k_cap - 1]), eval_samples, "traces")
    sel = strategy_selection(instance, strategy, k_cap)
    return GrowResult(Selection(sel.order, full.clipped or sel.clipped, sel.padded), k_cap, est, False, curve)
