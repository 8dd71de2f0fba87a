import math

import pytest

from blowuplab import oracles as O


def test_integrator_self_check():
    t = O.blowup_time_of_ode(lambda t, g: g * g, 1.0, 10.0)
    assert t == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
def test_elastic_lower_matches_closed_form(eps):
    t = O.elastic_lower_ode(eps)
    assert t == pytest.approx(32.0 * (1 - eps) ** 2 / (9 * eps ** 2), rel=1e-2)


def test_elastic_bracket_ordering():
    b = O.elastic_bracket(0.1)
    assert 0 < b.t_upper < b.t_lower
    assert b.t_lower == pytest.approx(288.0, rel=1e-6)
    assert b.t_upper == pytest.approx(2.0 / (b.params["d2"] * b.g0_upper), rel=1e-3)


def test_duct_bracket_values():
    b = O.duct_bracket(0.1, 0.0)
    assert b.t_upper == pytest.approx(8.0 / 5.9, rel=1e-6)
    # slow ODE with drift term delta3 = eps: slightly above 16/(ea*g0)
    assert b.t_lower == pytest.approx(16.0 / 5.9, rel=2e-2)
    assert b.t_lower > b.t_upper


def test_duct_bracket_alpha_scaling():
    b0 = O.duct_bracket(0.1, 0.0)
    b5 = O.duct_bracket(0.1, 0.5)
    # times scale like eps^-alpha
    assert b5.t_upper / b0.t_upper == pytest.approx(0.1 ** -0.5, rel=2e-2)


def test_off_core_bound():
    assert O.off_core_noblowup_bound(0.1, 0.0) == pytest.approx(80.0)
    assert O.off_core_noblowup_bound(0.1, 0.5) == pytest.approx(8.0 * 10.0 ** 2)


@pytest.mark.parametrize("m", [1, 2])
def test_radial_bracket(m):
    b = O.radial_bracket(0.1, m)
    g0 = 2.0 * 2.0 ** m - 0.1
    assert b.t_lower == pytest.approx(12.0 / (m * g0), rel=1e-3)
    assert b.t_upper == pytest.approx(4.0 / (m * g0), rel=1e-3)


def test_bracket_contains():
    b = O.duct_bracket(0.1, 0.0)
    assert b.contains(2.0, slack_lo=0.95, slack_hi=1.2)
    assert not b.contains(10.0, slack_lo=0.95, slack_hi=1.2)
