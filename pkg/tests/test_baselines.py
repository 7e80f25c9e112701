import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from activefriending import Instance, SocialGraph, estimate_f_traces, grow_until, hd, sp

from _instances import B, T, augmented, line, random_instance


def star_chain():
    # s=0 - x=1 - h=2 - t=3, with five leaves 4..8 on h
    edges = [(0, 1), (1, 2), (2, 3)] + [(2, v) for v in range(4, 9)]
    return Instance(SocialGraph.from_edges(9, edges), 0, 3)


def test_hd_examples():
    assert hd(augmented(), 2).nodes == {T, B}
    assert hd(augmented(), 1).nodes == {T}
    assert hd(star_chain(), 2).nodes == {3, 2}


def test_hd_clips():
    sel = hd(line(), 5)
    assert sel.clipped and sel.nodes == {B, T}


def test_sp_examples():
    assert sp(augmented(), 1).nodes == {T}
    sel = sp(augmented(), 2)
    assert sel.nodes == {T, B} and not sel.padded


def test_sp_disconnected_target_pads():
    g = SocialGraph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    inst = Instance(g, 0, 3)
    one = sp(inst, 1)
    assert one.nodes == {3}
    more = sp(inst, 3)
    assert more.padded and 3 in more.nodes and len(more) == 3


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        hd(line(), 0)
    with pytest.raises(ValueError):
        sp(line(), 0)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(4, 12))
def test_strategies_nested_and_within_candidates(seed, n):
    inst = random_instance(np.random.default_rng(seed), n, 0.35, connected_t=False)
    m = len(inst.candidates)
    for fn in (hd, sp):
        prev = frozenset()
        for k in range(1, m + 1):
            sel = fn(inst, k)
            assert inst.t in sel.nodes
            assert sel.nodes <= inst.candidates
            assert len(sel) == k
            assert prev <= sel.nodes
            prev = sel.nodes


def test_grow_until_examples():
    assert grow_until(line(), "hd", 0.0, 1000, 5, 1).k == 1
    r = grow_until(line(), "sp", 0.5, 10_000, 5, 1)
    assert r.reached and r.k == 2 and r.selection.nodes == {B, T}
    for strategy in ("hd", "sp"):
        assert not grow_until(line(), strategy, 0.9, 10_000, 5, 1).reached


def test_grow_until_scores_match_direct_estimates():
    inst = star_chain()
    r = grow_until(inst, "hd", 1.0, 4000, 8, 17)
    for k in range(1, len(r.curve) + 1):
        assert r.curve[k - 1] == estimate_f_traces(inst, hd(inst, k).nodes, 4000, 17).mean


def test_grow_until_estimate_reproducible_under_fresh_seed():
    inst = augmented()
    r = grow_until(inst, "sp", 0.7, 20_000, 3, 5)
    fresh = estimate_f_traces(inst, r.selection.nodes, 20_000, 6)
    assert abs(fresh.mean - r.estimate.mean) <= r.estimate.half_width + fresh.half_width
