"""
Estimating acceptance probabilities
===================================

Simulating the threshold process and counting covered backward traces give
the same number; the trace count is far cheaper on large graphs.
"""

import networkx as nx

from activefriending import (Instance, SocialGraph, estimate_f_thresholds, estimate_f_traces,
                             stopping_rule_estimate)

g = nx.barabasi_albert_graph(2000, 4, seed=3)
graph = SocialGraph.from_edges(2000, list(g.edges()))
inst = Instance(graph, s=0, t=1500)

##############################################################################
# Invite every candidate within three hops of t.

near = nx.single_source_shortest_path_length(g, 1500, cutoff=3)
invited = {v for v in near if v in inst.candidates}
print(len(invited), "invited")

for est in (estimate_f_thresholds(inst, invited, 50_000, seed=1),
            estimate_f_traces(inst, invited, 50_000, seed=1)):
    print(f"{est.method.value:>10}: {est.mean:.4f} +- {est.half_width:.4f}")

##############################################################################
# p_max to within 10% relative error, failing with probability 1/N.

est = stopping_rule_estimate(inst, epsilon0=0.1, n_big=1000, seed=2)
print(f"p* = {est.p_star:.4f} after {est.total_samples} traces ({est.upsilon} successes)")
