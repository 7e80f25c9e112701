"""Social graph model, edge-list ingestion and the V_max candidate region.

Weights follow the friending convention: ``w(u, v)`` is the familiarity of
``v`` with its friend ``u``, i.e. the probability that ``v`` selects ``u`` in a
realization.  For every node ``v`` the incoming weights ``sum_u w(u, v)`` are
at most one.
"""

from __future__ import annotations

import enum
import io
import math
import os
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ContractViolation, GraphFormatError, InvalidInstanceError, NormalizationError

WEIGHT_SLACK = 1e-9
# none-probabilities below this are treated as exactly zero
_ZERO_SNAP = 1e-12


class WeightScheme(str, enum.Enum):
    DEGREE_RECIPROCAL = "recip"
    EXPLICIT = "file"


class VmaxMode(str, enum.Enum):
    EXACT = "exact"
    OVERAPPROX = "overapprox"


class SocialGraph:
    """Undirected graph with per-ordered-pair familiarity weights.

    Adjacency is stored in CSR form with neighbours sorted by id.  For node
    ``v`` the slice ``indptr[v]:indptr[v + 1]`` of ``indices`` lists ``N_v`` and
    the same slice of ``weights`` holds ``w(u, v)`` for each listed ``u``.
    All arrays are read-only; the graph is immutable once built.

    Use :meth:`from_edges` or :func:`load_edge_list` rather than calling the
    constructor directly.
    """

    def __init__(self, indptr, indices, weights, labels=None):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.float64)
        n = len(self.indptr) - 1
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        self.labels = np.asarray(labels, dtype=np.int64)
        self._check_basic()

        deg = np.diff(self.indptr)
        rows = np.repeat(np.arange(n, dtype=np.int64), deg)
        # position of the mirrored entry (v in row u) for every entry (u in row v)
        order = np.lexsort((rows, self.indices))
        mirror = np.empty_like(order)
        mirror[order] = np.arange(len(order))
        if np.any(self.indices[mirror] != rows) or np.any(rows[mirror] != self.indices):
            raise ValueError("adjacency is not symmetric")
        self.mirror = mirror

        totals = np.bincount(rows, weights=self.weights, minlength=n)
        none_prob = 1.0 - totals
        none_prob[np.abs(none_prob) < _ZERO_SNAP] = 0.0
        self.none_prob = np.clip(none_prob, 0.0, 1.0)

        cum = self.weights.copy()
        for v in np.flatnonzero(deg):
            lo, hi = self.indptr[v], self.indptr[v + 1]
            np.cumsum(self.weights[lo:hi], out=cum[lo:hi])
            if self.none_prob[v] == 0.0:
                cum[hi - 1] = 1.0
        self.cumweights = cum

        for arr in (self.indptr, self.indices, self.weights, self.labels,
                    self.mirror, self.none_prob, self.cumweights):
            arr.flags.writeable = False
        self._label_index = None

    def _check_basic(self):
        n = self.n
        if self.indptr[0] != 0 or np.any(np.diff(self.indptr) < 0):
            raise ValueError("indptr must start at 0 and be non-decreasing")
        if len(self.indices) != self.indptr[-1] or len(self.weights) != len(self.indices):
            raise ValueError("indices/weights length does not match indptr")
        if len(self.labels) != n:
            raise ValueError("one label per node required")
        if not len(self.indices):
            return
        if self.indices.min() < 0 or self.indices.max() >= n:
            raise ValueError("neighbour id out of range")
        if np.any(~(self.weights > 0.0)) or np.any(self.weights > 1.0):
            raise ValueError("edge weights must lie in (0, 1]")
        deg = np.diff(self.indptr)
        rows = np.repeat(np.arange(n), deg)
        loops = np.flatnonzero(rows == self.indices)
        if len(loops):
            raise ValueError(f"self-loop at node {rows[loops[0]]}")
        same_row = rows[1:] == rows[:-1]
        if np.any(same_row & (np.diff(self.indices) <= 0)):
            raise ValueError("neighbour lists must be strictly increasing")
        totals = np.bincount(rows, weights=self.weights, minlength=n)
        over = np.flatnonzero((deg > 0) & (totals > 1.0 + WEIGHT_SLACK))
        if len(over):
            v = over[0]
            raise NormalizationError(int(self.labels[v]), float(totals[v]))

    @classmethod
    def from_edges(cls, n, edges, scheme=WeightScheme.DEGREE_RECIPROCAL, weights=None, labels=None):
        """Build a graph on nodes ``0..n-1``.

        ``edges`` is an iterable of ``(u, v)`` pairs; duplicates (in either
        orientation) are collapsed.  With ``scheme="file"`` pass ``weights`` as
        a mapping from ordered pair ``(u, v)`` to ``w(u, v)`` for both
        orientations of every edge.
        """
        scheme = WeightScheme(scheme)
        adj = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            adj[u].add(v)
            adj[v].add(u)
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in adj])
        indices = np.fromiter((u for a in adj for u in sorted(a)), dtype=np.int64, count=indptr[-1])
        w = np.empty(len(indices))
        for v in range(n):
            lo, hi = indptr[v], indptr[v + 1]
            if scheme is WeightScheme.DEGREE_RECIPROCAL:
                w[lo:hi] = 1.0 / (hi - lo) if hi > lo else 0.0
            else:
                for k in range(lo, hi):
                    try:
                        w[k] = weights[(int(indices[k]), v)]
                    except KeyError:
                        raise ValueError(f"missing weight w({indices[k]}, {v})") from None
        return cls(indptr, indices, w, labels)

    @property
    def n(self):
        return len(self.indptr) - 1

    @property
    def m(self):
        return len(self.indices) // 2

    def degree(self, v=None):
        deg = np.diff(self.indptr)
        return deg if v is None else int(deg[v])

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def weight(self, u, v):
        """``w(u, v)``; zero when ``u`` and ``v`` are not friends."""
        lo, hi = self.indptr[v], self.indptr[v + 1]
        k = lo + np.searchsorted(self.indices[lo:hi], u)
        if k < hi and self.indices[k] == u:
            return float(self.weights[k])
        return 0.0

    def node_id(self, label):
        """Dense id of an original node label."""
        if self._label_index is None:
            self._label_index = {int(lab): i for i, lab in enumerate(self.labels)}
        try:
            return self._label_index[int(label)]
        except KeyError:
            raise KeyError(f"unknown node label {label}") from None

    def label(self, v):
        return int(self.labels[v])

    def to_networkx(self):
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        deg = np.diff(self.indptr)
        rows = np.repeat(np.arange(self.n), deg)
        mask = rows < self.indices
        g.add_edges_from(zip(rows[mask].tolist(), self.indices[mask].tolist()))
        return g

    def edge_list(self):
        deg = np.diff(self.indptr)
        rows = np.repeat(np.arange(self.n), deg)
        mask = rows < self.indices
        return list(zip(rows[mask].tolist(), self.indices[mask].tolist()))

    def __repr__(self):
        return f"SocialGraph(n={self.n}, m={self.m})"


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8"), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8")), True
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8"), False


def _parse_label(tok, lineno):
    try:
        lab = int(tok)
    except ValueError:
        raise GraphFormatError(f"expected an integer node label, got {tok!r}", lineno) from None
    if lab < 0:
        raise GraphFormatError(f"negative node label {lab}", lineno)
    return lab


def _parse_weight(tok, lineno):
    try:
        w = float(tok)
    except ValueError:
        raise GraphFormatError(f"expected a decimal weight, got {tok!r}", lineno) from None
    if not (0.0 < w <= 1.0) or math.isnan(w):
        raise GraphFormatError(f"weight {tok} outside (0, 1]", lineno)
    return w


def load_edge_list(source, weight_scheme=WeightScheme.DEGREE_RECIPROCAL):
    """Read a SNAP-style edge list.

    ``source`` may be a path, a bytes object, or a binary/text stream.  Lines
    starting with ``#`` and blank lines are skipped.  Under ``"recip"`` each
    line holds two non-negative integer labels and ``w(u, v) = 1/|N_v|``.
    Under ``"file"`` each line is ``u v w_uv w_vu`` where ``w_uv = w(u, v)``.

    Labels are densified in increasing label order; ``graph.labels`` maps
    dense ids back.
    """
    scheme = WeightScheme(weight_scheme)
    ncols = 2 if scheme is WeightScheme.DEGREE_RECIPROCAL else 4
    fh, close = _open_text(source)
    pairs = []
    wmap = {}
    try:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if len(toks) != ncols:
                raise GraphFormatError(f"expected {ncols} fields, got {len(toks)}", lineno)
            u, v = _parse_label(toks[0], lineno), _parse_label(toks[1], lineno)
            if u == v:
                raise GraphFormatError(f"self-loop on node {u}", lineno)
            pairs.append((u, v))
            if ncols == 4:
                w_uv, w_vu = _parse_weight(toks[2], lineno), _parse_weight(toks[3], lineno)
                for key, w in (((u, v), w_uv), ((v, u), w_vu)):
                    if key in wmap and wmap[key] != w:
                        raise GraphFormatError(f"conflicting duplicate weight for {key}", lineno)
                    wmap[key] = w
    except UnicodeDecodeError as exc:
        raise GraphFormatError(f"input is not UTF-8: {exc}") from None
    finally:
        if close:
            fh.close()

    labels = np.array(sorted({x for p in pairs for x in p}), dtype=np.int64)
    index = {int(lab): i for i, lab in enumerate(labels)}
    edges = [(index[u], index[v]) for u, v in pairs]
    if scheme is WeightScheme.DEGREE_RECIPROCAL:
        return SocialGraph.from_edges(len(labels), edges, scheme, labels=labels)
    dense = {(index[u], index[v]): w for (u, v), w in wmap.items()}
    return SocialGraph.from_edges(len(labels), edges, scheme, weights=dense, labels=labels)


@dataclass(frozen=True, eq=False)
class Instance:
    """A friending problem: initiator ``s`` wants to befriend target ``t``."""

    graph: SocialGraph
    s: int
    t: int

    def __post_init__(self):
        n = self.graph.n
        for name in ("s", "t"):
            v = getattr(self, name)
            if not 0 <= v < n:
                raise InvalidInstanceError(f"{name}={v} is not a node of the graph")
        if self.s == self.t:
            raise InvalidInstanceError("initiator and target coincide")
        if self.t in self.seed_set:
            raise InvalidInstanceError("target is already a friend of the initiator")

    @classmethod
    def from_labels(cls, graph, s_label, t_label):
        try:
            return cls(graph, graph.node_id(s_label), graph.node_id(t_label))
        except KeyError as exc:
            raise InvalidInstanceError(str(exc.args[0])) from None

    @cached_property
    def seed_set(self):
        """``N_s`` as a frozenset."""
        return frozenset(self.graph.neighbors(self.s).tolist())

    @cached_property
    def seed_mask(self):
        mask = np.zeros(self.graph.n, dtype=np.bool_)
        mask[list(self.seed_set)] = True
        mask.flags.writeable = False
        return mask

    @cached_property
    def candidates(self):
        """Invitable nodes ``V \\ ({s} | N_s)``."""
        excluded = self.seed_set | {self.s}
        return frozenset(v for v in range(self.graph.n) if v not in excluded)

    def check_invitation(self, invited):
        """Return ``invited`` as a frozenset, raising if it leaves the candidates."""
        inv = frozenset(int(v) for v in invited)
        bad = inv - self.candidates
        if bad:
            raise ContractViolation(f"invitation contains non-candidate nodes {sorted(bad)}")
        return inv


def _contracted_graph(instance):
    """Graph on candidates plus a super-source standing for all of ``N_s``."""
    g = instance.graph
    sigma = g.n
    h = nx.Graph()
    h.add_nodes_from(instance.candidates)
    h.add_node(sigma)
    seeds = instance.seed_mask
    for u, v in g.edge_list():
        if u == instance.s or v == instance.s:
            continue
        su, sv = seeds[u], seeds[v]
        if su and sv:
            continue
        h.add_edge(sigma if su else u, sigma if sv else v)
    return h, sigma


def compute_vmax(instance, mode=VmaxMode.EXACT):
    """Candidates that can appear on a chain from ``N_s`` to ``t``.

    ``"exact"`` returns the candidates lying on some simple path from the
    merged seed neighbourhood to ``t`` whose interior avoids ``{s} | N_s``.
    Such a vertex is exactly one that shares a biconnected block with the
    (possibly virtual) edge between the super-source and ``t``, which gives a
    linear-time computation.

    ``"overapprox"`` returns candidates reachable from ``N_s`` in ``G - s``
    that can also reach ``t`` there; always a superset of the exact set.

    Returns an empty frozenset when ``t`` cannot be reached from ``N_s``.
    """
    mode = VmaxMode(mode)
    if mode is VmaxMode.OVERAPPROX:
        return _vmax_overapprox(instance)
    h, sigma = _contracted_graph(instance)
    if not nx.has_path(h, sigma, instance.t):
        return frozenset()
    h.add_edge(sigma, instance.t)
    for block in nx.biconnected_components(h):
        if sigma in block and instance.t in block:
            return frozenset(block - {sigma})
    raise AssertionError("edge (sigma, t) lies in no block")


def _vmax_overapprox(instance):
    g = instance.graph
    keep = (np.repeat(np.arange(g.n), g.degree()) != instance.s) & (g.indices != instance.s)
    rows = np.repeat(np.arange(g.n), g.degree())[keep]
    adj = csr_matrix((np.ones(len(rows)), (rows, g.indices[keep])), shape=(g.n, g.n))
    _, comp = connected_components(adj, directed=False)
    ct = comp[instance.t]
    if not any(comp[u] == ct for u in instance.seed_set):
        return frozenset()
    return frozenset(v for v in instance.candidates if comp[v] == ct)
