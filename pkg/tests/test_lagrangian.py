"""Lagrangian flow-map cross-checks against the Eulerian fields."""

import numpy as np
import pytest

from blowuplab import lagrangian as LG
from blowuplab import profiles, solver


@pytest.fixture(scope="module")
def elastic_run():
    # short, well-resolved elastic window: rho0 == 1 so rho * F == 1 holds
    sc = profiles.make_elastic_scenario(0.1, n_cells=4000, max_time=30.0)
    return solver.run(sc)


@pytest.fixture(scope="module")
def elastic_flowmap(elastic_run):
    return LG.integrate_flowmap(elastic_run, n_particles=401)


def test_flowmap_starts_at_labels(elastic_flowmap):
    assert np.array_equal(elastic_flowmap.x[0], elastic_flowmap.X)
    assert np.allclose(elastic_flowmap.F[0], 1.0)


def test_flowmap_stays_monotone(elastic_flowmap):
    # particles never cross before blowup: x(X, t) increasing in X
    assert np.all(np.diff(elastic_flowmap.x, axis=1) > 0.0)


def test_mass_identity_on_smooth_window(elastic_run, elastic_flowmap):
    out = LG.mass_identity(elastic_run, elastic_flowmap, t_frac=0.75)
    assert out["max_abs_deviation"] <= 0.05, out


def test_wave_equation_residual_small(elastic_run, elastic_flowmap):
    out = LG.wave_equation_residual(elastic_run, elastic_flowmap, t_frac=0.75)
    assert out["rel_max_residual"] <= 0.2, out


def test_uniform_flow_advects_labels():
    # u == const, rho == const: particles translate rigidly and F == 1
    prof = profiles.build_constant_profile(2.0)
    sc = profiles.Scenario(
        name="duct",
        profile=prof,
        rho0=lambda x: np.full_like(x, 1.0),
        u0=lambda x: np.full_like(x, 0.5),
        epsilon=0.1,
        domain=(-2.0, 2.0),
        n_cells=400,
        max_time=0.5,
    )
    res = solver.run(sc)
    fm = LG.integrate_flowmap(res, n_particles=101, x_range=(-1.0, 0.0))
    shift = fm.x - fm.X[None, :]
    expect = 0.5 * fm.t[:, None]
    assert np.allclose(shift, expect, atol=1e-10)
    assert np.allclose(fm.F, 1.0, atol=1e-12)


def test_t_max_truncates_march(elastic_run):
    fm = LG.integrate_flowmap(elastic_run, n_particles=51, t_max=10.0)
    assert fm.t[-1] <= 10.0
    with pytest.raises(ValueError):
        LG.integrate_flowmap(elastic_run, n_particles=51, t_max=-1.0)
