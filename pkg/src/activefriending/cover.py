"""Minimum subset cover over backward-trace node sets.

Given a family of subsets (with multiplicities) of a ground set and a target
``p``, find a small ground subset ``V*`` such that the subsets contained in
``V*`` have total multiplicity at least ``p``.  An optimal ``V*`` can always be
taken to be a union of family members, which is what both solvers build.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InfeasibleCoverError, IntractableError

DEFAULT_EXACT_CAP = 25
DEFAULT_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class CoverInstance:
    universe: frozenset
    family: tuple  # ((frozenset, multiplicity), ...) in sorted-tuple order
    p: int

    def __post_init__(self):
        for members, mult in self.family:
            if mult < 1:
                raise ValueError("multiplicities must be >= 1")
            if not members <= self.universe:
                raise ValueError(f"family set {sorted(members)} leaves the universe")
        if not 0 <= self.p <= self.family_size:
            raise InfeasibleCoverError(f"p={self.p} exceeds family size {self.family_size}")

    @classmethod
    def from_sets(cls, universe, sets, p):
        """Build from an iterable of (possibly repeated) subsets."""
        counts = {}
        for x in sets:
            x = frozenset(x)
            counts[x] = counts.get(x, 0) + 1
        return cls(frozenset(universe), _ordered(counts), int(p))

    @property
    def family_size(self):
        return sum(m for _, m in self.family)

    def covered(self, chosen):
        chosen = frozenset(chosen)
        return sum(m for members, m in self.family if members <= chosen)


@dataclass(frozen=True)
class CoverSolution:
    chosen: frozenset
    covered: int
    exact: bool


def _ordered(counts):
    return tuple(sorted(counts.items(), key=lambda kv: tuple(sorted(kv[0]))))


def _group_keys(batch, sel, n_nodes, key_seed):
    if n_nodes <= 63:
        node_keys = np.left_shift(np.uint64(1), np.arange(n_nodes, dtype=np.uint64))
    else:
        node_keys = np.random.default_rng(key_seed).integers(0, 2**63, n_nodes, dtype=np.uint64)
    return _kernels.set_keys(batch.offsets, batch.nodes, node_keys)[sel]


def build_cover_instance(batch, candidates, p):
    """Cover instance from the type-1 traces of ``batch``.

    Type-0 traces can never be covered and are dropped.  Identical node sets
    are merged with their multiplicity.
    """
    p = int(p)
    if p > batch.ones:
        raise InfeasibleCoverError(f"p={p} exceeds the {batch.ones} type-1 traces")
    sel = np.flatnonzero(batch.y == 1)
    counts = {}
    if len(sel):
        n_nodes = int(batch.nodes.max()) + 1
        keys = _group_keys(batch, sel, n_nodes, 0x5EED)
        uniq, first, inverse, mult = np.unique(keys, return_index=True, return_inverse=True,
                                               return_counts=True)
        exact = n_nodes <= 63
        if not exact:
            # a second independent key must agree within every group
            check = _group_keys(batch, sel, n_nodes, 0xC0FFEE)
            exact = np.array_equal(check, check[first][inverse])
        if exact:
            for f, m in zip(first.tolist(), mult.tolist()):
                i = sel[f]
                members = frozenset(batch.nodes[batch.offsets[i]:batch.offsets[i + 1]].tolist())
                counts[members] = counts.get(members, 0) + m
        else:
            for i in sel.tolist():
                members = frozenset(batch.nodes[batch.offsets[i]:batch.offsets[i + 1]].tolist())
                counts[members] = counts.get(members, 0) + 1
    return CoverInstance(frozenset(candidates), _ordered(counts), p)


def solve_greedy(ci):
    """Grow the solution one whole family set at a time.

    Picks the not-yet-covered set needing the fewest new nodes; ties go to
    higher multiplicity, then to the lexicographically smallest set.
    """
    if ci.p == 0:
        return CoverSolution(frozenset(), 0, False)
    sets = [tuple(sorted(members)) for members, _ in ci.family]
    mults = [m for _, m in ci.family]
    missing = [len(x) for x in sets]
    containing = {}
    for j, x in enumerate(sets):
        for v in x:
            containing.setdefault(v, []).append(j)
    heap = [(missing[j], -mults[j], sets[j], j) for j in range(len(sets))]
    heapq.heapify(heap)
    chosen = set()
    covered = 0
    while covered < ci.p:
        miss, _, _, j = heapq.heappop(heap)
        if miss != missing[j] or miss == 0:
            continue
        for v in sets[j]:
            if v in chosen:
                continue
            chosen.add(v)
            for k in containing[v]:
                missing[k] -= 1
                if missing[k] == 0:
                    covered += mults[k]
                else:
                    heapq.heappush(heap, (missing[k], -mults[k], sets[k], k))
    return CoverSolution(frozenset(chosen), covered, False)


def solve_exact(ci, max_sets=DEFAULT_EXACT_CAP, node_budget=DEFAULT_NODE_BUDGET):
    """Minimum-cardinality cover by branch and bound over unions of family sets.

    Raises :class:`IntractableError` when the family has more than
    ``max_sets`` distinct sets or the search expands more than
    ``node_budget`` nodes.
    """
    if ci.p == 0:
        return CoverSolution(frozenset(), 0, True)
    fam = sorted(ci.family, key=lambda fm: (len(fm[0]), tuple(sorted(fm[0]))))
    if len(fam) > max_sets:
        raise IntractableError(f"{len(fam)} distinct sets exceed the exact cap {max_sets}")
    ground = sorted(set().union(*(members for members, _ in fam)))
    bit = {v: 1 << i for i, v in enumerate(ground)}
    masks = [sum(bit[v] for v in members) for members, _ in fam]
    mults = [m for _, m in fam]
    d = len(masks)

    def covered(mask):
        return sum(m for mk, m in zip(masks, mults) if mk & ~mask == 0)

    # suffix unions for the feasibility bound
    tail = [0] * (d + 1)
    for i in range(d - 1, -1, -1):
        tail[i] = tail[i + 1] | masks[i]

    seed = solve_greedy(ci)
    best_mask = sum(bit[v] for v in seed.chosen)
    best_size = len(seed.chosen)
    expanded = 0

    def search(i, mask, size):
        nonlocal best_mask, best_size, expanded
        expanded += 1
        if expanded > node_budget:
            raise IntractableError(f"branch and bound exceeded {node_budget} nodes")
        if covered(mask) >= ci.p:
            if size < best_size:
                best_mask, best_size = mask, size
            return
        if i == d or covered(mask | tail[i]) < ci.p:
            return
        extra = [(masks[j] & ~mask).bit_count() for j in range(i, d) if masks[j] & ~mask]
        if not extra or size + min(extra) >= best_size:
            return
        new = masks[i] & ~mask
        if new:
            search(i + 1, mask | masks[i], size + new.bit_count())
        search(i + 1, mask, size)

    search(0, 0, 0)
    chosen = frozenset(v for v in ground if best_mask & bit[v])
    return CoverSolution(chosen, ci.covered(chosen), True)


def solve(ci, exact_cap=DEFAULT_EXACT_CAP):
    """Exact when the family is small enough, greedy otherwise."""
    if len(ci.family) <= exact_cap:
        try:
            return solve_exact(ci, max_sets=exact_cap)
        except IntractableError:
            pass
    return solve_greedy(ci)
