import math

import numpy as np
import pytest

from activefriending import Instance, ParameterError, PMaxTooSmall, SocialGraph, stopping_rule_estimate, upsilon
from activefriending.pmax import default_max_samples
from activefriending.realization import sample_types

from _instances import augmented, diamond, line


def test_upsilon_value():
    # ceil(1 + 4 (e - 2) 1.5 ln(200) / 0.25)
    expected = math.ceil(1 + 4 * (math.e - 2) * 1.5 * math.log(200) / 0.25)
    assert expected == 93
    assert upsilon(0.5, 100) == 93


@pytest.mark.parametrize("eps0, n_big", [(0.0, 10), (1.5, 10), (0.5, 2)])
def test_upsilon_rejects_bad_parameters(eps0, n_big):
    with pytest.raises(ParameterError):
        upsilon(eps0, n_big)


def test_diamond_stops_at_upsilon():
    est = stopping_rule_estimate(diamond(), 0.5, 100, seed=4)
    assert est.total_samples == 93
    assert est.p_star == 1.0


def test_stops_at_exact_success_index():
    inst = augmented()
    est = stopping_rule_estimate(inst, 0.5, 100, seed=11)
    y = np.concatenate([sample_types(inst, b, 11) for b in range(4)])
    idx = np.flatnonzero(y)[est.upsilon - 1]
    assert est.total_samples == idx + 1
    assert est.p_star == est.upsilon / est.total_samples


def test_line_estimate_is_close():
    est = stopping_rule_estimate(line(), 0.3, 10, seed=1)
    assert abs(est.p_star - 0.5) <= 0.15


def test_unreachable_target_raises():
    g = SocialGraph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    with pytest.raises(PMaxTooSmall) as err:
        stopping_rule_estimate(Instance(g, 0, 3), 0.5, 10, max_samples=5000)
    assert err.value.samples == 5000


def test_default_cap_targets_floor():
    assert default_max_samples(0.5, 100) == 100 * 93 * 100
