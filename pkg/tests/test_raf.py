import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from activefriending import ParameterError, PMaxTooSmall, RafOptions, compute_l_star, raf, solve_alpha_one, solve_params
from activefriending.graph import Instance, SocialGraph
from activefriending.raf import make_config, solve_params_capped

from _instances import B, T, augmented, diamond, line


def closed_form(alpha, epsilon, n_eff):
    # x = eps1 (1 + eps0) solves beta (1 - x) - x = alpha - epsilon with beta = (alpha - x) / (1 + x)
    x = epsilon / (2 + 2 * alpha - epsilon)
    e1 = (-1 + math.sqrt(1 + 4 * n_eff * x)) / (2 * n_eff)
    return n_eff * e1, e1, (alpha - x) / (1 + x)


def back_substitution_residual(alpha, epsilon, e0, e1, beta):
    x = e1 * (1 + e0)
    return max(abs(beta - (alpha - x) / (1 + x)), abs(beta * (1 - x) - x - (alpha - epsilon)))


@pytest.mark.parametrize("alpha, epsilon, n_eff", [(0.1, 0.01, 100), (1.0, 0.5, 1), (0.7, 0.07, 5)])
def test_params_match_closed_form(alpha, epsilon, n_eff):
    got = solve_params(alpha, epsilon, n_eff)
    assert got == pytest.approx(closed_form(alpha, epsilon, n_eff), rel=1e-10)
    assert back_substitution_residual(alpha, epsilon, *got) <= 1e-9
    assert 0 < got[2] < 1


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(0.01, 1.0), frac=st.floats(0.01, 0.99), n_eff=st.integers(1, 10**6))
def test_params_residual_property(alpha, frac, n_eff):
    epsilon = alpha * frac
    e0, e1, beta = solve_params(alpha, epsilon, n_eff)
    assert e0 == pytest.approx(n_eff * e1)
    assert back_substitution_residual(alpha, epsilon, e0, e1, beta) <= 1e-9


def test_capped_params_keep_slack():
    e0, e1, beta = solve_params_capped(0.1, 0.01, 0.5)
    assert e0 == 0.5
    assert back_substitution_residual(0.1, 0.01, e0, e1, beta) <= 1e-9
    cfg = make_config(0.1, 0.01, 1e5, 5000)
    assert not cfg.coupled and cfg.epsilon0 == 0.5
    assert make_config(0.1, 0.01, 1e5, 10).coupled


@pytest.mark.parametrize("alpha, epsilon", [(0.0, 0.0), (1.2, 0.1), (0.5, 0.5), (0.5, -0.1)])
def test_bad_params(alpha, epsilon):
    with pytest.raises(ParameterError):
        solve_params(alpha, epsilon, 10)


def test_l_star_direct_formula():
    e0, e1, n_big, n_eff, p = 0.5, 0.25, 100, 10, 0.5
    num = (math.log(2) + math.log(n_big) + n_eff * math.log(2)) * (2 + e1 * (1 - e0))
    expected = math.ceil(num / (e1**2 * (1 - e0) ** 2 * p))
    assert expected == 3327
    assert compute_l_star(e0, e1, n_big, n_eff, p) == expected


def test_l_star_rejects_eps0_one():
    with pytest.raises(ParameterError):
        compute_l_star(1.0, 0.1, 10, 3, 0.5)


def test_diamond_solution():
    sol = raf(diamond(), 0.5, 0.1, 10, seed=3)
    assert sol.invitation == {T}
    assert sol.f_check.mean == 1.0


def test_augmented_high_alpha_needs_b():
    hits = sum(raf(augmented(), 0.9, 0.05, 10, RafOptions(eval_samples=0), seed=s).invitation == {B, T}
               for s in range(100))
    assert hits >= 90


def test_line_single_trace_shape():
    for seed in range(5):
        sol = raf(line(), 0.99, 0.01, 10, RafOptions(l_override=5000, eval_samples=0), seed=seed)
        assert sol.invitation == {B, T}
        assert sol.l == 5000


def test_feasibility_recount():
    sol = raf(augmented(), 0.6, 0.06, 10, RafOptions(eval_samples=0), seed=0)
    assert sol.covered >= sol.p == math.ceil(sol.config.beta * sol.ones)


def test_deterministic_and_worker_independent():
    a = raf(augmented(), 0.5, 0.05, 10, RafOptions(l_override=20_000), seed=9)
    b = raf(augmented(), 0.5, 0.05, 10, RafOptions(l_override=20_000, workers=3), seed=9)
    assert a == b


def test_unreachable_target():
    g = SocialGraph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    with pytest.raises(PMaxTooSmall):
        raf(Instance(g, 0, 3), 0.5, 0.05, 10)


def test_alpha_one_is_vmax():
    assert solve_alpha_one(line()) == {B, T}
    assert solve_alpha_one(diamond()) == {T}
