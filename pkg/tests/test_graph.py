import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from activefriending import (ContractViolation, GraphFormatError, Instance, InvalidInstanceError,
                             NormalizationError, SocialGraph, VmaxMode, WeightScheme, compute_vmax,
                             load_edge_list)

from _instances import A, B, S, T, augmented, brute_vmax, diamond, flow_vmax, line, line_with_pendant, random_instance


def test_degree_reciprocal_weights():
    g = augmented().graph
    assert g.weight(A, T) == pytest.approx(0.5)
    assert g.weight(B, T) == pytest.approx(0.5)
    assert g.weight(S, A) == pytest.approx(1 / 3)
    assert g.weight(T, B) == pytest.approx(0.5)
    assert g.weight(S, T) == 0.0
    np.testing.assert_allclose(g.none_prob, 0.0)


def test_load_edge_list_skips_comments_and_densifies_labels():
    g = load_edge_list(io.StringIO("# comment\n10 20\n20 30\n\n30 40\n"))
    assert g.n == 4 and g.m == 3
    assert [g.label(v) for v in range(4)] == [10, 20, 30, 40]
    assert g.node_id(30) == 2


def test_load_from_bytes_and_path(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n")
    assert load_edge_list(p).m == 2
    assert load_edge_list(b"0 1\n1 2\n").m == 2


def test_duplicate_edges_collapse():
    g = load_edge_list(io.StringIO("0 1\n1 0\n0 1\n"))
    assert g.m == 1


@pytest.mark.parametrize("text, line_no", [
    ("0 1\n1 x\n", 2),
    ("0 1\n2 2\n", 2),
    ("0 1 2\n", 1),
    ("-1 2\n", 1),
])
def test_parse_errors_carry_line_numbers(text, line_no):
    with pytest.raises(GraphFormatError) as err:
        load_edge_list(io.StringIO(text))
    assert err.value.line == line_no
    assert f"line {line_no}" in str(err.value)


def test_file_weights():
    g = load_edge_list(io.StringIO("0 1 0.5 0.25\n1 2 0.5 0.5\n"), WeightScheme.EXPLICIT)
    assert g.weight(0, 1) == 0.5
    assert g.weight(1, 0) == 0.25
    assert g.none_prob[1] == pytest.approx(0.0)
    assert g.none_prob[0] == pytest.approx(0.75)


def test_file_weights_over_one_rejected():
    with pytest.raises(NormalizationError) as err:
        load_edge_list(io.StringIO("0 1 0.7 0.5\n2 1 0.7 0.5\n"), WeightScheme.EXPLICIT)
    assert err.value.node == 1


def test_conflicting_duplicate_weights_rejected():
    with pytest.raises(GraphFormatError):
        load_edge_list(io.StringIO("0 1 0.5 0.5\n1 0 0.2 0.5\n"), WeightScheme.EXPLICIT)


def test_file_scheme_needs_four_fields():
    with pytest.raises(GraphFormatError):
        load_edge_list(io.StringIO("0 1\n"), WeightScheme.EXPLICIT)


def test_instance_validation():
    g = line().graph
    with pytest.raises(InvalidInstanceError):
        Instance(g, S, S)
    with pytest.raises(InvalidInstanceError):
        Instance(g, S, A)
    with pytest.raises(InvalidInstanceError):
        Instance(g, S, 9)
    with pytest.raises(InvalidInstanceError):
        Instance.from_labels(g, 0, 77)


def test_candidates_and_invitation_check():
    inst = line()
    assert inst.seed_set == {A}
    assert inst.candidates == {B, T}
    with pytest.raises(ContractViolation):
        inst.check_invitation({A, T})


def test_arrays_read_only():
    g = line().graph
    with pytest.raises(ValueError):
        g.weights[0] = 1.0


@pytest.mark.parametrize("make, exact, over", [
    (line, {B, T}, {B, T}),
    (diamond, {T}, {T}),
    (augmented, {B, T}, {B, T}),
    (line_with_pendant, {B, T}, {B, T, 4}),
])
def test_vmax_hand_examples(make, exact, over):
    inst = make()
    assert compute_vmax(inst, VmaxMode.EXACT) == exact
    assert compute_vmax(inst, VmaxMode.OVERAPPROX) == over


def test_vmax_ignores_detours_between_seed_friends():
    # x hangs between two friends of s; a trace stops at the first friend it meets
    g = SocialGraph.from_edges(5, [(0, 1), (0, 2), (1, 4), (4, 2), (2, 3)])
    assert compute_vmax(Instance(g, 0, 3), VmaxMode.EXACT) == {3}


def test_vmax_unreachable_target_is_empty():
    g = SocialGraph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    inst = Instance(g, 0, 3)
    assert compute_vmax(inst, VmaxMode.EXACT) == frozenset()
    assert compute_vmax(inst, VmaxMode.OVERAPPROX) == frozenset()


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 9), p=st.floats(0.2, 0.7))
def test_vmax_matches_path_and_flow_oracles(seed, n, p):
    inst = random_instance(np.random.default_rng(seed), n, p, connected_t=False)
    exact = compute_vmax(inst, VmaxMode.EXACT)
    assert exact == brute_vmax(inst)
    assert exact == flow_vmax(inst)
    assert exact <= compute_vmax(inst, VmaxMode.OVERAPPROX)
