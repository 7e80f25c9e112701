"""Compiled inner loops for backward walks and threshold cascades.

The walk kernel consumes one uniform per visited node from a caller-supplied
buffer; it never draws randomness itself, so every stream stays owned by a
numpy Generator on the Python side.
"""

import numpy as np
from numba import njit

# terminal codes shared with realization.Terminal
REACHED_SEED = 0
DANGLING = 1
CYCLE = 2
THROUGH_S = 3

# walk_block status codes
DONE = 0
NEED_UNIFORMS = 1
NEED_SPACE = 2


@njit(nogil=True, cache=True)
def walk_block(uniforms, pos, count, done, indptr, indices, cumw, is_seed, s, t,
               mark, stamp, store, nodes, used, ends, terms, term_nodes):
    """Run backward walks ``done .. count-1`` of one block.

    Returns ``(status, done, pos, used, stamp)``.  On ``NEED_UNIFORMS`` or
    ``NEED_SPACE`` the unfinished walk is rolled back so that the caller can
    refill/grow and call again; the walk restarts from the same uniform.
    """
    nu = uniforms.shape[0]
    cap = nodes.shape[0]
    while done < count:
        start_pos = pos
        start_used = used
        stamp += 1
        cur = t
        mark[t] = stamp
        if store:
            if used >= cap:
                return NEED_SPACE, done, start_pos, start_used, stamp
            nodes[used] = t
            used += 1
        length = 1
        term = -1
        end = -1
        while True:
            if pos >= nu:
                return NEED_UNIFORMS, done, start_pos, start_used, stamp
            r = uniforms[pos]
            pos += 1
            lo = indptr[cur]
            hi = indptr[cur + 1]
            j = lo + np.searchsorted(cumw[lo:hi], r, side="right")
            if j >= hi:
                term = DANGLING
                break
            nxt = indices[j]
            if mark[nxt] == stamp:
                term = CYCLE
                end = nxt
                break
            if is_seed[nxt]:
                term = REACHED_SEED
                end = nxt
                break
            if nxt == s:
                term = THROUGH_S
                end = nxt
                break
            if store:
                if used >= cap:
                    return NEED_SPACE, done, start_pos, start_used, stamp
                nodes[used] = nxt
                used += 1
            mark[nxt] = stamp
            cur = nxt
            length += 1
        ends[done] = used if store else length
        terms[done] = term
        term_nodes[done] = end
        done += 1
    return DONE, done, pos, used, stamp


@njit(nogil=True, cache=True)
def cascade(theta, invited, seeds, indptr, indices, weights, mirror, t, active, acc):
    """Threshold friending process for one threshold draw.

    ``theta[k]`` is the threshold of ``invited[k]``.  ``active``/``acc`` are
    scratch arrays of length n, zeroed on entry and restored on exit.
    Returns ``(success, rounds)``.
    """
    n_inv = invited.shape[0]
    for v in seeds:
        active[v] = 1
    for v in seeds:
        for k in range(indptr[v], indptr[v + 1]):
            acc[indices[k]] += weights[mirror[k]]
    joined = np.empty(n_inv, dtype=np.int64)
    success = False
    rounds = 0
    while True:
        nj = 0
        for i in range(n_inv):
            u = invited[i]
            if active[u] == 0 and acc[u] >= theta[i]:
                joined[nj] = u
                nj += 1
        if nj == 0:
            break
        rounds += 1
        for i in range(nj):
            active[joined[i]] = 1
        for i in range(nj):
            v = joined[i]
            for k in range(indptr[v], indptr[v + 1]):
                acc[indices[k]] += weights[mirror[k]]
        if active[t] == 1:
            success = True
            break
    active[:] = 0
    acc[:] = 0.0
    return success, rounds


@njit(nogil=True, cache=True)
def cascade_block(thetas, invited, seeds, indptr, indices, weights, mirror, t, n):
    active = np.zeros(n, dtype=np.int8)
    acc = np.zeros(n, dtype=np.float64)
    hits = 0
    for r in range(thetas.shape[0]):
        ok, _ = cascade(thetas[r], invited, seeds, indptr, indices, weights, mirror,
                        t, active, acc)
        if ok:
            hits += 1
    return hits


@njit(nogil=True, cache=True)
def set_keys(offsets, nodes, node_keys):
    """Order-independent 64-bit key of every trace's node set."""
    l = offsets.shape[0] - 1
    out = np.zeros(l, dtype=np.uint64)
    for i in range(l):
        h = np.uint64(0)
        for k in range(offsets[i], offsets[i + 1]):
            h += node_keys[nodes[k]]
        out[i] = h
    return out


@njit(nogil=True, cache=True)
def max_rank(offsets, nodes, rank, select):
    """Largest rank of any node of each selected trace (-1 if not selected).

    ``rank[v]`` is the 1-based position of ``v`` in an ordering, or a value
    larger than any budget when ``v`` is not ordered.
    """
    l = offsets.shape[0] - 1
    out = np.full(l, -1, dtype=np.int64)
    for i in range(l):
        if not select[i]:
            continue
        m = 0
        for k in range(offsets[i], offsets[i + 1]):
            r = rank[nodes[k]]
            if r > m:
                m = r
        out[i] = m
    return out
