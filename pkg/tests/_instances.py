"""Small hand-checkable graphs and independent oracles shared by the tests."""

import itertools

import networkx as nx

from activefriending import Instance, SocialGraph

S, A, B, T = 0, 1, 2, 3


def line():
    """s - a - b - t"""
    return Instance(SocialGraph.from_edges(4, [(S, A), (A, B), (B, T)]), S, T)


def augmented():
    """The line plus the chord a - t."""
    return Instance(SocialGraph.from_edges(4, [(S, A), (A, B), (B, T), (A, T)]), S, T)


def diamond():
    """s - a, s - b, a - t, b - t: t only touches the initiator's friends."""
    return Instance(SocialGraph.from_edges(4, [(S, A), (S, B), (A, T), (B, T)]), S, T)


def line_with_pendant():
    """The line plus a node u hanging off t."""
    return Instance(SocialGraph.from_edges(5, [(S, A), (A, B), (B, T), (T, 4)]), S, T)


def random_graph(rng, n, p_edge):
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p_edge]
    return SocialGraph.from_edges(n, edges)


def random_instance(rng, n, p_edge=0.5, connected_t=True):
    """A random degree-reciprocal instance on ``n`` nodes with a valid (s, t)."""
    while True:
        g = random_graph(rng, n, p_edge)
        s, t = (int(x) for x in rng.choice(n, 2, replace=False))
        if t in set(g.neighbors(s).tolist()):
            continue
        inst = Instance(g, s, t)
        if connected_t and not brute_vmax(inst):
            continue
        return inst


def brute_vmax(instance):
    """Union of simple paths from N_s to t whose interior avoids s and N_s."""
    g = instance.graph.to_networkx()
    g.remove_node(instance.s)
    seeds = instance.seed_set
    out = set()
    for a in seeds:
        h = g.subgraph([v for v in g if v not in seeds or v == a])
        if instance.t not in h:
            continue
        for path in nx.all_simple_paths(h, a, instance.t):
            out.update(path[1:])
    return frozenset(out)


def flow_vmax(instance):
    """V_max by vertex connectivity: v qualifies iff two disjoint routes join it to {N_s, t}."""
    g = instance.graph.to_networkx()
    seeds = instance.seed_set
    h = nx.Graph()
    sigma, x = "sigma", "x"
    cands = instance.candidates
    h.add_nodes_from(cands)
    h.add_node(sigma)
    for u, v in g.edges():
        if u in cands and v in cands:
            h.add_edge(u, v)
        elif u in cands and v in seeds:
            h.add_edge(u, sigma)
        elif v in cands and u in seeds:
            h.add_edge(v, sigma)
    if not nx.has_path(h, sigma, instance.t):
        return frozenset()
    h.add_edge(x, sigma)
    h.add_edge(x, instance.t)
    out = {instance.t}
    for v in cands - {instance.t}:
        if nx.has_path(h, v, x) and nx.algorithms.connectivity.local_node_connectivity(h, v, x) >= 2:
            out.add(v)
    return frozenset(out)


def subsets(nodes):
    nodes = sorted(nodes)
    for r in range(len(nodes) + 1):
        yield from (frozenset(c) for c in itertools.combinations(nodes, r))


def brute_min_alpha_set(instance, alpha, f_of):
    """Smallest I with f(I) >= alpha * p_max, by exhaustive search."""
    p_max = f_of(instance.candidates)
    return min(len(sub) for sub in subsets(instance.candidates) if f_of(sub) >= alpha * p_max - 1e-12)
