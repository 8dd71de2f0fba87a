"""Gradient-variable co-evolution: affine structure and the C^1 monitor."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blowuplab import profiles, solver
from blowuplab.gradientvars import GradientField, c1_blowup_monitor
from blowuplab.solver import Grid1D


def _field(n=64, seed=0):
    rng = np.random.default_rng(seed)
    sc = profiles.make_duct_scenario(0.1, alpha=0.0, n_cells=n)
    grid = Grid1D(sc.domain[0], sc.domain[1], n)
    gf = GradientField.from_scenario(sc, grid)
    x = grid.centers()
    S = 2.0 + 0.5 * np.sin(2.0 * np.pi * x / 4.0) + 0.1 * rng.standard_normal(n)
    R = -1.0 - 0.1 * rng.random(n)
    return gf, S, R


def test_initial_fields_match_fd_gradient():
    sc = profiles.make_duct_scenario(0.1, alpha=0.0, n_cells=2000)
    grid = Grid1D(sc.domain[0], sc.domain[1], 2000)
    gf = GradientField.from_scenario(sc, grid)
    x = grid.centers()
    S0, R0 = sc.initial_riemann(x)
    rho0 = 2.0 * gf.c / (S0 - R0)
    assert np.allclose(gf.v, np.gradient(S0, x) / rho0)
    assert np.allclose(gf.w, np.gradient(R0, x) / rho0)
    # initial data is built so R is flat: w starts at machine zero
    assert np.abs(gf.w).max() < 1e-12


@settings(deadline=None, max_examples=25)
@given(
    a=st.floats(-2.0, 2.0, allow_nan=False),
    b=st.floats(-2.0, 2.0, allow_nan=False),
    seed=st.integers(0, 10),
)
def test_step_is_affine_in_vw(a, b, seed):
    # with carriers frozen, step(v, w) = L(v, w) + const for a linear map L,
    # so superpositions of deviations from a base state evolve linearly
    gf0, S, R = _field(seed=seed)
    dt = 1e-3

    def advance(v0, w0):
        gf = GradientField(
            x=gf0.x, dx=gf0.dx, c=gf0.c, A=gf0.A, B=gf0.B,
            v=v0.copy(), w=w0.copy(),
        )
        gf.step(S, R, dt)
        return gf.v, gf.w

    rng = np.random.default_rng(seed + 100)
    v_base, w_base = gf0.v, gf0.w
    dv1, dw1 = rng.standard_normal(v_base.size), rng.standard_normal(v_base.size)
    dv2, dw2 = rng.standard_normal(v_base.size), rng.standard_normal(v_base.size)

    out_base = advance(v_base, w_base)
    out_1 = advance(v_base + dv1, w_base + dw1)
    out_2 = advance(v_base + dv2, w_base + dw2)
    out_ab = advance(v_base + a * dv1 + b * dv2, w_base + a * dw1 + b * dw2)

    for k in (0, 1):
        lin = out_base[k] + a * (out_1[k] - out_base[k]) + b * (out_2[k] - out_base[k])
        assert np.allclose(out_ab[k], lin, rtol=1e-9, atol=1e-9)


def test_homogeneous_medium_has_no_source():
    # constant c: A = B = 0, so v rides its characteristic unchanged in sup norm
    prof = profiles.build_constant_profile(2.0)
    sc = profiles.Scenario(
        name="duct", profile=prof,
        rho0=lambda x: np.full_like(x, 1.0),
        u0=lambda x: np.zeros_like(x),
        epsilon=0.1, domain=(-2.0, 2.0),
    )
    grid = Grid1D(-2.0, 2.0, 400)
    gf = GradientField.from_scenario(sc, grid)
    assert np.all(gf.A == 0.0) and np.all(gf.B == 0.0)
    x = grid.centers()
    gf.v = np.exp(-(x ** 2))
    S = np.full(400, 2.0)
    R = np.full(400, -2.0)
    sup0 = np.abs(gf.v).max()
    for _ in range(50):
        gf.step(S, R, 1e-3)
    assert np.abs(gf.v).max() <= sup0 * (1.0 + 1e-12)


def test_history_arrays_accumulate():
    gf, S, R = _field()
    gf.step(S, R, 1e-3)
    gf.snapshot(1e-3)
    h = gf.history_arrays()
    assert h["t"].shape == (2,)
    assert np.all(h["v_sup"] >= 0.0)


@pytest.fixture(scope="module")
def duct_gradient_run():
    sc = profiles.make_duct_scenario(
        0.1, alpha=0.0, n_cells=1000, gradient_corun=True
    )
    return solver.run(sc)


def test_c1_monitor_requires_corun():
    sc = profiles.make_duct_scenario(0.1, alpha=0.0, n_cells=200, max_time=0.05)
    res = solver.run(sc)
    with pytest.raises(ValueError, match="gradient"):
        c1_blowup_monitor(res)


def test_c1_does_not_lead_linf(duct_gradient_run):
    rep = c1_blowup_monitor(duct_gradient_run)
    assert rep["passed"], rep
    assert rep["c1_lead_intervals"] <= 2


def test_c1_norm_grows_with_peak(duct_gradient_run):
    h = duct_gradient_run.gradient.history_arrays()
    c1 = np.maximum(h["v_sup"], h["w_sup"])
    assert c1[-1] > 10.0 * c1[0]
