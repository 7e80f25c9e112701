"""
Solving an instance with RAF
============================

RAF samples backward traces, then invites the fewest nodes that cover a
beta-fraction of the traces reaching a friend of s.
"""

import networkx as nx

from activefriending import Instance, RafOptions, SocialGraph, compute_vmax, raf

g = nx.barabasi_albert_graph(3000, 5, seed=11)
graph = SocialGraph.from_edges(3000, list(g.edges()))
inst = Instance(graph, s=7, t=2500)

##############################################################################
# The worst-case batch size is enormous for small epsilon; ``l_override``
# fixes it at a practical value.

opts = RafOptions(l_override=200_000, eval_samples=200_000)
sol = raf(inst, alpha=0.5, epsilon=0.05, n_big=1000, options=opts, seed=1)

cfg = sol.config
print(f"eps0={cfg.epsilon0:.4f} eps1={cfg.epsilon1:.2e} beta={cfg.beta:.4f} l*={cfg.l_star:.3g}")
print(f"p* = {sol.pmax_estimate.p_star:.4f}")
print(f"|I*| = {len(sol.invitation)}, covered {sol.covered} of {sol.ones} type-1 traces (needed {sol.p})")
print(f"f(I*) = {sol.f_check.mean:.4f} +- {sol.f_check.half_width:.4f}")

##############################################################################
# Inviting all of V_max reaches p_max but costs many more invitations.

print("|V_max| =", len(compute_vmax(inst)))
