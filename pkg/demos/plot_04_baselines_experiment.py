"""
RAF against the HD and SP baselines
===================================

Sample (s, t) pairs with a reasonable p_max, solve each with RAF, then give
the high-degree and shortest-path strategies the same budget.
"""

import json

import networkx as nx

from activefriending import SocialGraph
from activefriending.harness import ExperimentConfig, run_experiment

g = nx.barabasi_albert_graph(2000, 7, seed=2017)
graph = SocialGraph.from_edges(2000, list(g.edges()))

cfg = ExperimentConfig(dataset="synthetic", pair_count=5, alpha=0.1, epsilon=0.01, n_big=100_000,
                       l_override=50_000, eval_samples=200_000, seed=3)
report = run_experiment(cfg, graph=graph)

##############################################################################
# One CSV row per pair; the summary carries averages, seeds and timings.

print(report.csv)
print(json.dumps(report.summary["aggregates"], indent=2))

##############################################################################
# Growing HD until it matches f(I_RAF) shows how many more invitations it needs.

cfg.experiment = "match-hd"
report = run_experiment(cfg, graph=graph)
print(json.dumps(report.summary["aggregates"]["size_ratio_by_f_ratio"], indent=2))
