"""
Exact answers on four-node graphs
=================================

On tiny graphs every realization can be listed, so the acceptance
probability of any invitation set is known exactly.
"""

from activefriending import Instance, SocialGraph, compute_vmax, exact_f, exact_pmax, trace_distribution

##############################################################################
# The line s - a - b - t.  Node ids: s=0, a=1, b=2, t=3.

line = Instance(SocialGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), s=0, t=3)

for trace, prob in sorted(trace_distribution(line).items(), key=lambda kv: kv[0].format()):
    print(f"{prob:.3f}  {trace.format()}")

##############################################################################
# t always picks b; b picks a half of the time.  Inviting only t never works.

print("f({t})   =", exact_f(line, {3}).mean)
print("f({b,t}) =", exact_f(line, {2, 3}).mean)
print("p_max    =", exact_pmax(line))

##############################################################################
# Adding the chord a - t gives t a direct route through a friend of s.

aug = Instance(SocialGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (1, 3)]), s=0, t=3)
print("f({t})   =", exact_f(aug, {3}).mean)
print("f({b,t}) =", exact_f(aug, {2, 3}).mean)

##############################################################################
# V_max is the smallest set reaching p_max: every candidate on a simple path
# from a friend of s to t.

print("V_max =", sorted(compute_vmax(aug)))
