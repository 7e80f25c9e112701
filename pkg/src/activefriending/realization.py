"""Live-edge realizations and backward traces.

A realization lets every node pick at most one friend, ``u`` with probability
``w(u, v)``.  Following picks backwards from ``t`` gives the trace ``t(g)``:
the chain stops when it reaches ``N_s`` (type-1), picks nobody, closes a cycle
or runs into ``s`` (all type-0).  An invitation set ``I`` befriends ``t`` under
``g`` exactly when the trace is type-1 and its nodes lie inside ``I``.
"""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import ContractViolation, EnumerationTooLarge
from .rng import BLOCK_SIZE, block_rng, blocks

# marker for "selected nobody" in full realizations
ALEPH0 = -1
DEFAULT_ENUMERATION_CAP = 10**7


class FriendingOutcome(NamedTuple):
    success: bool
    friends: frozenset
    rounds: int


class Terminal(enum.IntEnum):
    REACHED_SEED = _kernels.REACHED_SEED
    DANGLING = _kernels.DANGLING
    CYCLE = _kernels.CYCLE
    THROUGH_S = _kernels.THROUGH_S


@dataclass(frozen=True)
class BackwardTrace:
    """The chain ``t(g)``: ``nodes[0] == t``, then successive picks.

    ``end`` is the node that stopped the walk (the reached seed, the repeated
    node, or ``s``) and ``-1`` for a dangling walk.
    """

    nodes: tuple
    terminal: Terminal
    end: int = -1

    @property
    def y(self):
        return int(self.terminal is Terminal.REACHED_SEED)

    @property
    def node_set(self):
        return frozenset(self.nodes)

    def covered_by(self, invited):
        return self.y == 1 and all(v in invited for v in self.nodes)

    def format(self):
        term = self.terminal.name.lower()
        if self.end >= 0:
            term = f"{term}:{self.end}"
        return f"{self.y} {term} {','.join(map(str, self.nodes))}"


def _pick(graph, v, r):
    lo, hi = graph.indptr[v], graph.indptr[v + 1]
    j = lo + int(np.searchsorted(graph.cumweights[lo:hi], r, side="right"))
    return int(graph.indices[j]) if j < hi else ALEPH0


def sample_backward_trace(instance, rng):
    """Draw one trace by lazily sampling only the nodes on the chain.

    Consumes exactly one ``rng.random()`` per visited node, the same stream
    layout as :func:`sample_batch`.
    """
    g = instance.graph
    seeds = instance.seed_set
    nodes = [instance.t]
    on_chain = {instance.t}
    cur = instance.t
    while True:
        nxt = _pick(g, cur, rng.random())
        if nxt == ALEPH0:
            return BackwardTrace(tuple(nodes), Terminal.DANGLING)
        if nxt in on_chain:
            return BackwardTrace(tuple(nodes), Terminal.CYCLE, nxt)
        if nxt in seeds:
            return BackwardTrace(tuple(nodes), Terminal.REACHED_SEED, nxt)
        if nxt == instance.s:
            return BackwardTrace(tuple(nodes), Terminal.THROUGH_S, nxt)
        nodes.append(nxt)
        on_chain.add(nxt)
        cur = nxt


def trace_of(instance, realization):
    """Extract ``t(g)`` from a full realization (sequence of picks, ``-1`` = none)."""
    seeds = instance.seed_set
    nodes = [instance.t]
    on_chain = {instance.t}
    cur = instance.t
    while True:
        nxt = int(realization[cur])
        if nxt == ALEPH0:
            return BackwardTrace(tuple(nodes), Terminal.DANGLING)
        if nxt in on_chain:
            return BackwardTrace(tuple(nodes), Terminal.CYCLE, nxt)
        if nxt in seeds:
            return BackwardTrace(tuple(nodes), Terminal.REACHED_SEED, nxt)
        if nxt == instance.s:
            return BackwardTrace(tuple(nodes), Terminal.THROUGH_S, nxt)
        nodes.append(nxt)
        on_chain.add(nxt)
        cur = nxt


@dataclass(frozen=True, eq=False)
class RealizationBatch:
    """A multiset of ``l`` traces stored as flat arrays.

    Trace ``i`` has nodes ``nodes[offsets[i]:offsets[i + 1]]`` (starting at
    ``t``), terminal code ``terminal[i]`` and stopping node ``end[i]``.
    """

    offsets: np.ndarray
    nodes: np.ndarray
    terminal: np.ndarray
    end: np.ndarray
    seed: int

    @property
    def l(self):
        return len(self.terminal)

    def __len__(self):
        return self.l

    @property
    def y(self):
        return (self.terminal == Terminal.REACHED_SEED).astype(np.int8)

    @property
    def ones(self):
        return int(np.count_nonzero(self.terminal == Terminal.REACHED_SEED))

    def trace(self, i):
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return BackwardTrace(tuple(self.nodes[lo:hi].tolist()), Terminal(int(self.terminal[i])),
                             int(self.end[i]))

    def __iter__(self):
        for i in range(self.l):
            yield self.trace(i)

    def covered_count(self, invited):
        """``F(B_l, I)``: number of traces covered by ``invited`` (exact recount)."""
        if self.l == 0:
            return 0
        mask = np.zeros(int(self.nodes.max()) + 1, dtype=np.bool_)
        inv = [v for v in invited if v < len(mask)]
        mask[inv] = True
        inside = np.add.reduceat(mask[self.nodes].astype(np.int64), self.offsets[:-1])
        lengths = np.diff(self.offsets)
        return int(np.count_nonzero((inside == lengths) & (self.terminal == Terminal.REACHED_SEED)))

    def same_as(self, other):
        return all(np.array_equal(getattr(self, f), getattr(other, f))
                   for f in ("offsets", "nodes", "terminal", "end"))

    def dump(self, fh):
        """Write one ``"y terminal node,node,..."`` line per trace."""
        for tr in self:
            fh.write(tr.format() + "\n")


def _run_block(instance, master_seed, block, count, store):
    g = instance.graph
    rng = block_rng(master_seed, block)
    uniforms = rng.random(max(4 * count, 64))
    nodes = np.empty(max(4 * count, 64) if store else 1, dtype=np.int64)
    ends = np.empty(count, dtype=np.int64)
    terms = np.empty(count, dtype=np.int8)
    term_nodes = np.empty(count, dtype=np.int64)
    mark = np.zeros(g.n, dtype=np.int64)
    is_seed = instance.seed_mask
    pos = used = done = stamp = 0
    while True:
        status, done, pos, used, stamp = _kernels.walk_block(
            uniforms, pos, count, done, g.indptr, g.indices, g.cumweights, is_seed,
            instance.s, instance.t, mark, stamp, store, nodes, used, ends, terms, term_nodes)
        if status == _kernels.DONE:
            break
        if status == _kernels.NEED_UNIFORMS:
            uniforms = np.concatenate([uniforms[pos:], rng.random(len(uniforms))])
            pos = 0
        else:
            nodes = np.concatenate([nodes, np.empty(len(nodes), dtype=np.int64)])
    if store:
        return nodes[:used], ends, terms, term_nodes
    return None, ends, terms, term_nodes


def _map_blocks(fn, count, workers):
    jobs = list(blocks(count))
    if workers and workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda j: fn(*j), jobs))
    return [fn(*j) for j in jobs]


def sample_batch(instance, l, master_seed, workers=None):
    """Sample ``l`` independent traces.

    Trace ``i`` is driven by the stream of block ``i // BLOCK_SIZE`` under
    ``master_seed``, so the batch is identical for any ``workers`` value.
    """
    l = int(l)
    parts = _map_blocks(lambda b, lo, hi: _run_block(instance, master_seed, b, hi - lo, True),
                        l, workers)
    offsets = [np.zeros(1, dtype=np.int64)]
    base = 0
    for nodes, ends, _, _ in parts:
        offsets.append(ends + base)
        base += len(nodes)
    return RealizationBatch(
        offsets=np.concatenate(offsets),
        nodes=np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, dtype=np.int64),
        terminal=np.concatenate([p[2] for p in parts]) if parts else np.zeros(0, dtype=np.int8),
        end=np.concatenate([p[3] for p in parts]) if parts else np.zeros(0, dtype=np.int64),
        seed=int(master_seed),
    )


def sample_types(instance, block, master_seed):
    """Type flags of the traces in one block (nodes are not stored)."""
    _, _, terms, _ = _run_block(instance, master_seed, block, BLOCK_SIZE, False)
    return terms == Terminal.REACHED_SEED


def forward_process2(instance, realization, invited):
    """Grow ``H`` from ``N_s`` under a fixed realization.

    Each round adds the invited nodes whose pick already sits in ``H``; stops
    when nothing joins or ``t`` joins.  Returns ``(success, H_inf, rounds)``.
    """
    inv = instance.check_invitation(invited)
    h = set(instance.seed_set)
    rounds = 0
    while True:
        joining = {v for v in inv if v not in h and realization[v] != ALEPH0 and realization[v] in h}
        if not joining:
            break
        rounds += 1
        h |= joining
        if instance.t in h:
            break
    return FriendingOutcome(instance.t in h, frozenset(h), rounds)


def _choices(graph, v):
    lo, hi = graph.indptr[v], graph.indptr[v + 1]
    opts = [(int(u), float(w)) for u, w in zip(graph.indices[lo:hi], graph.weights[lo:hi])]
    opts.append((ALEPH0, float(graph.none_prob[v])))
    return opts


def realization_count(graph):
    return math.prod(int(d) + 1 for d in graph.degree())


def enumerate_realizations(instance, cap=DEFAULT_ENUMERATION_CAP):
    """Yield every full realization ``g`` (tuple of picks) with ``Pr[g]``.

    Zero-probability picks (``none`` at fully normalised nodes) are yielded
    too, so exactly ``prod_v (|N_v| + 1)`` realizations come out.
    """
    g = instance.graph
    total = realization_count(g)
    if total > cap:
        raise EnumerationTooLarge(f"instance too large for enumeration: {total} realizations > cap {cap}")
    per_node = [_choices(g, v) for v in range(g.n)]
    for combo in itertools.product(*per_node):
        yield tuple(c[0] for c in combo), math.prod(c[1] for c in combo)


def trace_distribution(instance, method="enumerate", cap=DEFAULT_ENUMERATION_CAP):
    """Exact distribution of ``t(g)`` as a dict ``BackwardTrace -> probability``.

    ``"enumerate"`` sums over all full realizations.  ``"chains"`` explores only
    the backward chains from ``t``, multiplying pick probabilities; it is
    exponential in chain length but not in ``n``.
    """
    dist = {}
    if method == "enumerate":
        for real, p in enumerate_realizations(instance, cap):
            if p == 0.0:
                continue
            tr = trace_of(instance, real)
            dist[tr] = dist.get(tr, 0.0) + p
        return dist
    if method != "chains":
        raise ValueError(f"unknown method {method!r}")
    g = instance.graph
    seeds = instance.seed_set
    stack = [((instance.t,), 1.0)]
    while stack:
        chain, p = stack.pop()
        for nxt, w in _choices(g, chain[-1]):
            if w == 0.0:
                continue
            q = p * w
            if nxt == ALEPH0:
                tr = BackwardTrace(chain, Terminal.DANGLING)
            elif nxt in chain:
                tr = BackwardTrace(chain, Terminal.CYCLE, nxt)
            elif nxt in seeds:
                tr = BackwardTrace(chain, Terminal.REACHED_SEED, nxt)
            elif nxt == instance.s:
                tr = BackwardTrace(chain, Terminal.THROUGH_S, nxt)
            else:
                stack.append((chain + (nxt,), q))
                continue
            dist[tr] = dist.get(tr, 0.0) + q
    return dist


def check_realization(instance, realization):
    """Validate that every pick is a neighbour or ``ALEPH0``."""
    g = instance.graph
    if len(realization) != g.n:
        raise ContractViolation("realization must assign a pick to every node")
    for v, u in enumerate(realization):
        if u != ALEPH0 and g.weight(u, v) == 0.0:
            raise ContractViolation(f"node {v} picks non-neighbour {u}")
