"""Characteristic-form finite-difference solver.

The system is evolved in the invariant pair (S, R):

    S_t + R S_x =  (c'/4c) (S^2 - R^2)
    R_t + S R_x = -(c'/4c) (S^2 - R^2)

Each invariant is advected at the *other* family's speed.  The scheme is
first-order per-cell upwind in space with an explicit midpoint (two-stage)
step in time and an adaptive CFL time step.  Boundaries are constant-state
Dirichlet: all scenarios are built so the domain ends sit on profile
plateaus where the data never moves.

A conservative HLL solver on (rho, m) with a cell-centered geometric source
can be co-run on the same time steps as an independent cross-check.
"""

from __future__ import annotations

import bisect
import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .profiles import Scenario

__all__ = [
    "Grid1D",
    "Snapshot",
    "RunResult",
    "SolverError",
    "run",
    "step_characteristic",
    "step_conservative",
    "trace_characteristic",
    "FieldInterpolator",
]

SERIES_COLUMNS = (
    "t", "dt", "s_max", "x_at_s_max", "r_min", "r_max",
    "rho_min", "x_at_rho_min", "rho_max", "energy_total",
)


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid1D:
    x_left: float
    x_right: float
    n: int

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n

    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.n) + 0.5) * self.dx

    def interfaces(self) -> np.ndarray:
        return self.x_left + np.arange(self.n + 1) * self.dx


@dataclass(frozen=True)
class Snapshot:
    t: float
    S: np.ndarray
    R: np.ndarray


@dataclass
class RunResult:
    scenario: Scenario
    grid: Grid1D
    x: np.ndarray
    c: np.ndarray
    snapshots: list
    series: dict
    status: str
    t_end: float
    n_steps: int
    blowup: dict
    traces: dict = field(default_factory=dict)
    conservative: Optional[dict] = None
    gradient: Optional[object] = None

    def rho(self, snap: Snapshot) -> np.ndarray:
        return 2.0 * self.c / (snap.S - snap.R)

    def u(self, snap: Snapshot) -> np.ndarray:
        return 0.5 * (snap.S + snap.R)

    def save(self, outdir, snapshot_stride: int = 10, x_stride: Optional[int] = None):
        """Write series.csv, snapshots.csv, traces.csv and summary.json."""
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)

        with open(out / "series.csv", "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(SERIES_COLUMNS)
            cols = [self.series[k] for k in SERIES_COLUMNS]
            for row in zip(*cols):
                w.writerow([repr(float(v)) for v in row])

        if x_stride is None:
            x_stride = max(1, self.grid.n // 400)
        snaps = self.snapshots[::snapshot_stride]
        if self.snapshots and snaps[-1] is not self.snapshots[-1]:
            snaps = snaps + [self.snapshots[-1]]
        with open(out / "snapshots.csv", "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["t", "x", "S", "R", "rho", "u", "c"])
            for s in snaps:
                rho = self.rho(s)[::x_stride]
                u = self.u(s)[::x_stride]
                for xv, Sv, Rv, rv, uv, cv in zip(
                    self.x[::x_stride], s.S[::x_stride], s.R[::x_stride],
                    rho, u, self.c[::x_stride]
                ):
                    w.writerow([repr(float(s.t)), repr(float(xv)), repr(float(Sv)),
                                repr(float(Rv)), repr(float(rv)), repr(float(uv)),
                                repr(float(cv))])

        if self.traces:
            with open(out / "traces.csv", "w", newline="") as f:
                w = csv.writer(f)
                w.writerow(["label", "t", "x", "S", "R", "c"])
                for label, tr in self.traces.items():
                    for row in zip(tr["t"], tr["x"], tr["S"], tr["R"], tr["c"]):
                        w.writerow([label] + [repr(float(v)) for v in row])

        summary = {
            "scenario": self.scenario.name,
            "epsilon": self.scenario.epsilon,
            "alpha": self.scenario.alpha,
            "m": self.scenario.m,
            "n_cells": self.grid.n,
            "dx": self.grid.dx,
            "domain": list(self.scenario.domain),
            "cfl": self.scenario.cfl,
            "status": self.status,
            "t_end": self.t_end,
            "n_steps": self.n_steps,
            "blowup": self.blowup,
            "conservative": self.conservative,
        }
        if self.scenario.profile.certificate is not None:
            summary["profile_certificate"] = json.loads(
                self.scenario.profile.certificate.to_json()
            )
        with open(out / "summary.json", "w") as f:
            json.dump(summary, f, indent=2, default=float)
        return out


# ---------------------------------------------------------------------------
# stepping


def _tendency(S, R, coef, dx, far):
    """Upwind semi-discrete right-hand side for (S, R)."""
    (Sl, Rl), (Sr, Rr) = far
    n = S.size
    Sp = np.empty(n + 2)
    Rp = np.empty(n + 2)
    Sp[1:-1], Rp[1:-1] = S, R
    Sp[0], Sp[-1] = Sl, Sr
    Rp[0], Rp[-1] = Rl, Rr

    Sx_b = (Sp[1:-1] - Sp[:-2]) / dx
    Sx_f = (Sp[2:] - Sp[1:-1]) / dx
    Rx_b = (Rp[1:-1] - Rp[:-2]) / dx
    Rx_f = (Rp[2:] - Rp[1:-1]) / dx

    Sx = np.where(R > 0.0, Sx_b, Sx_f)
    Rx = np.where(S > 0.0, Rx_b, Rx_f)
    src = coef * (S * S - R * R)
    return -R * Sx + src, -S * Rx - src


def step_characteristic(S, R, coef, dx, dt, far):
    """One explicit midpoint step of the upwind characteristic scheme."""
    dS1, dR1 = _tendency(S, R, coef, dx, far)
    S_half = S + 0.5 * dt * dS1
    R_half = R + 0.5 * dt * dR1
    dS2, dR2 = _tendency(S_half, R_half, coef, dx, far)
    return S + dt * dS2, R + dt * dR2


def _hll_flux(rho, m, c_ifc, far_cons):
    """HLL numerical flux for (rho, m)_t + (m, m^2/rho - c^2/rho)_x = src."""
    (rho_l, m_l), (rho_r, m_r) = far_cons
    n = rho.size
    rp = np.empty(n + 2)
    mp = np.empty(n + 2)
    rp[1:-1], mp[1:-1] = rho, m
    rp[0], rp[-1] = rho_l, rho_r
    mp[0], mp[-1] = m_l, m_r

    rL, mL = rp[:-1], mp[:-1]
    rR, mR = rp[1:], mp[1:]
    uL, uR = mL / rL, mR / rR
    aL, aR = c_ifc / rL, c_ifc / rR  # characteristic speeds are u -+ c/rho
    sL = np.minimum(uL - aL, uR - aR)
    sR = np.maximum(uL + aL, uR + aR)

    FL0, FL1 = mL, mL * uL - c_ifc ** 2 / rL
    FR0, FR1 = mR, mR * uR - c_ifc ** 2 / rR

    denom = sR - sL
    denom = np.where(np.abs(denom) < 1e-300, 1.0, denom)
    Fh0 = (sR * FL0 - sL * FR0 + sL * sR * (rR - rL)) / denom
    Fh1 = (sR * FL1 - sL * FR1 + sL * sR * (mR - mL)) / denom
    F0 = np.where(sL >= 0.0, FL0, np.where(sR <= 0.0, FR0, Fh0))
    F1 = np.where(sL >= 0.0, FL1, np.where(sR <= 0.0, FR1, Fh1))
    return F0, F1


def _tendency_conservative(rho, m, c_ifc, c_cell, cp_cell, dx, far_cons):
    F0, F1 = _hll_flux(rho, m, c_ifc, far_cons)
    d_rho = -(F0[1:] - F0[:-1]) / dx
    d_m = -(F1[1:] - F1[:-1]) / dx - c_cell * cp_cell / rho
    return d_rho, d_m


def step_conservative(rho, m, c_ifc, c_cell, cp_cell, dx, dt, far_cons):
    d1 = _tendency_conservative(rho, m, c_ifc, c_cell, cp_cell, dx, far_cons)
    rho_h = rho + 0.5 * dt * d1[0]
    m_h = m + 0.5 * dt * d1[1]
    d2 = _tendency_conservative(rho_h, m_h, c_ifc, c_cell, cp_cell, dx, far_cons)
    return rho + dt * d2[0], m + dt * d2[1]


# ---------------------------------------------------------------------------
# main loop


def run(scenario: Scenario) -> RunResult:
    sc = scenario
    grid = Grid1D(sc.domain[0], sc.domain[1], sc.n_cells)
    x = grid.centers()
    dx = grid.dx
    c = sc.profile.c(x)
    cp = sc.profile.c_prime(x)
    coef = cp / (4.0 * c)

    S, R = sc.initial_riemann(x)
    S = np.asarray(S, dtype=float).copy()
    R = np.asarray(R, dtype=float).copy()
    far = sc.far_states()

    s0_max = float(S.max())
    s_threshold = sc.s_max if sc.s_max is not None else sc.s_max_factor * s0_max
    hyper_floor = 1e-10 * float((S - R).min())
    dt_min = sc.cfl * dx / (10.0 * s_threshold)

    max_time = sc.max_time if math.isfinite(sc.max_time) else 1.0e6
    snap_interval = max_time / max(sc.snapshot_target, 2)

    do_cons = sc.conservative_xcheck
    if do_cons:
        rho_c = 2.0 * c / (S - R)
        m_c = rho_c * 0.5 * (S + R)
        x_ifc = grid.interfaces()
        c_ifc = sc.profile.c(x_ifc)
        (Sl, Rl), (Sr, Rr) = far
        cl, cr = float(c_ifc[0]), float(c_ifc[-1])
        far_cons = (
            (2.0 * cl / (Sl - Rl), (2.0 * cl / (Sl - Rl)) * 0.5 * (Sl + Rl)),
            (2.0 * cr / (Sr - Rr), (2.0 * cr / (Sr - Rr)) * 0.5 * (Sr + Rr)),
        )
        cons_l1 = []

    gradient_state = None
    if sc.gradient_corun:
        from . import gradientvars

        gradient_state = gradientvars.GradientField.from_scenario(sc, grid)

    series = {k: [] for k in SERIES_COLUMNS}
    snapshots = [Snapshot(0.0, S.copy(), R.copy())]
    next_snap = snap_interval

    def record(t, dt):
        """Append one series row; True if peak growth has stalled.

        Once the peak outgrows 10x its initial value, genuine Riccati growth
        multiplies max S by several percent over any 1% time window, so a
        sub-0.5% gain over that window means the narrowing peak has fallen
        below the grid scale and further integration only shrinks dt.
        """
        rho = 2.0 * c / (S - R)
        i_s = int(np.argmax(S))
        i_r = int(np.argmin(rho))
        e_tot = float(np.sum(0.25 * rho * (S * S + R * R)) * dx)
        vals = (t, dt, float(S[i_s]), float(x[i_s]), float(R.min()), float(R.max()),
                float(rho[i_r]), float(x[i_r]), float(rho.max()), e_tot)
        for k, v in zip(SERIES_COLUMNS, vals):
            series[k].append(v)
        s_now = vals[2]
        if s_now < 10.0 * s0_max or t <= 0.0:
            return False
        ts = series["t"]
        j = bisect.bisect_left(ts, 0.99 * t)
        if j >= len(ts) - 1:
            return False
        return s_now < 1.005 * series["s_max"][j]

    t = 0.0
    n_steps = 0
    status = "max_time"
    record(0.0, 0.0)

    while True:
        if not (np.all(np.isfinite(S)) and np.all(np.isfinite(R))):
            status = "instability"
            break
        if float((S - R).min()) <= hyper_floor:
            status = "hyperbolicity_loss"
            break
        if float(S.max()) >= s_threshold:
            status = "blowup_threshold"
            break
        if t >= max_time:
            status = "max_time"
            break

        speed = max(float(np.abs(S).max()), float(np.abs(R).max()), 1e-300)
        dt = sc.cfl * dx / speed
        if dt < dt_min:
            status = "dt_floor"
            break
        dt = min(dt, max_time - t)

        if gradient_state is not None:
            gradient_state.step(S, R, dt)
        S, R = step_characteristic(S, R, coef, dx, dt, far)
        if do_cons:
            rho_c, m_c = step_conservative(
                rho_c, m_c, c_ifc, c, cp, dx, dt, far_cons
            )

        t += dt
        n_steps += 1
        if n_steps % sc.series_every == 0:
            if record(t, dt):
                status = "resolution_stall"
                break
        if t >= next_snap:
            snapshots.append(Snapshot(t, S.copy(), R.copy()))
            if do_cons:
                rho_char = 2.0 * c / (S - R)
                cons_l1.append(
                    (t, float(np.sum(np.abs(rho_c - rho_char)) * dx),
                     float(np.sum(np.abs(rho_char)) * dx))
                )
            if gradient_state is not None:
                gradient_state.snapshot(t)
            next_snap += snap_interval

    if series["t"][-1] < t or n_steps == 0:
        record(t, series["dt"][-1] if n_steps else 0.0)
    if snapshots[-1].t < t:
        snapshots.append(Snapshot(t, S.copy(), R.copy()))
        if gradient_state is not None:
            gradient_state.snapshot(t)

    rho_fin = 2.0 * c / (S - R)
    i_s = int(np.argmax(S))
    blowup = {
        "detected": status in ("blowup_threshold", "hyperbolicity_loss", "resolution_stall"),
        "t_detect": t,
        "x_star_grid": float(x[i_s]),
        "s_max": float(S[i_s]),
        "rho_at_xstar": float(rho_fin[i_s]),
        "momentum_at_xstar": float(rho_fin[i_s] * 0.5 * (S[i_s] + R[i_s])),
        "rho_min": float(rho_fin.min()),
        "x_at_rho_min": float(x[int(np.argmin(rho_fin))]),
        "s_threshold": s_threshold,
    }

    result = RunResult(
        scenario=sc,
        grid=grid,
        x=x,
        c=c,
        snapshots=snapshots,
        series={k: np.asarray(v) for k, v in series.items()},
        status=status,
        t_end=t,
        n_steps=n_steps,
        blowup=blowup,
    )
    if do_cons:
        arr = np.asarray(cons_l1) if cons_l1 else np.zeros((0, 3))
        result.conservative = {
            "max_rel_l1_rho": float((arr[:, 1] / arr[:, 2]).max()) if arr.size else 0.0,
            "samples": arr.shape[0],
        }
    if gradient_state is not None:
        result.gradient = gradient_state

    # designated path into the blowup region, traced forward from t = 0
    try:
        result.traces["minus_from_start"] = trace_characteristic(
            result, x0=sc.trace_start, t0=0.0, family="minus", direction=+1
        )
    except SolverError:
        pass
    return result


# ---------------------------------------------------------------------------
# characteristic tracing through stored snapshots


class FieldInterpolator:
    """Linear-in-x, linear-in-t interpolation over a run's snapshots."""

    def __init__(self, result: RunResult):
        self.x = result.x
        self.ts = np.array([s.t for s in result.snapshots])
        self.S = np.stack([s.S for s in result.snapshots])
        self.R = np.stack([s.R for s in result.snapshots])
        self.far = result.scenario.far_states()
        self.profile = result.scenario.profile

    def __call__(self, xq: float, tq: float):
        ts = self.ts
        k = int(np.clip(np.searchsorted(ts, tq) - 1, 0, len(ts) - 2))
        w = 0.0 if ts[k + 1] == ts[k] else (tq - ts[k]) / (ts[k + 1] - ts[k])
        w = min(max(w, 0.0), 1.0)
        (Sl, Rl), (Sr, Rr) = self.far
        Sv = (1 - w) * np.interp(xq, self.x, self.S[k], left=Sl, right=Sr) + \
            w * np.interp(xq, self.x, self.S[k + 1], left=Sl, right=Sr)
        Rv = (1 - w) * np.interp(xq, self.x, self.R[k], left=Rl, right=Rr) + \
            w * np.interp(xq, self.x, self.R[k + 1], left=Rl, right=Rr)
        return float(Sv), float(Rv)


def trace_characteristic(
    result: RunResult,
    x0: float,
    t0: float,
    family: str = "minus",
    direction: int = +1,
    t_stop: Optional[float] = None,
) -> dict:
    """Trace dx/dt = speed(x, t) through the stored snapshots with midpoint
    steps, one per snapshot interval.  family='minus' follows speed R (the
    path along which S evolves), 'plus' follows speed S."""
    if family not in ("minus", "plus"):
        raise ValueError("family must be 'minus' or 'plus'")
    interp = FieldInterpolator(result)
    ts = interp.ts
    if t_stop is None:
        t_stop = float(ts[-1]) if direction > 0 else float(ts[0])
    if direction > 0:
        times = ts[(ts > t0) & (ts <= t_stop)]
    else:
        times = ts[(ts < t0) & (ts >= t_stop)][::-1]
    times = np.concatenate([[t0], times])
    if abs(times[-1] - t_stop) > 0:
        times = np.concatenate([times, [t_stop]])
    if len(times) < 2:
        raise SolverError("trace window contains no snapshot interval")

    idx = 0 if family == "plus" else 1

    def speed(xq, tq):
        return interp(xq, tq)[idx] if family == "minus" else interp(xq, tq)[0]

    xs = [x0]
    for ta, tb in zip(times[:-1], times[1:]):
        h = tb - ta
        xa = xs[-1]
        k1 = speed(xa, ta)
        k2 = speed(xa + 0.5 * h * k1, ta + 0.5 * h)
        xs.append(xa + h * k2)
    xs = np.asarray(xs)
    Sv = np.empty_like(xs)
    Rv = np.empty_like(xs)
    for i, (xq, tq) in enumerate(zip(xs, times)):
        Sv[i], Rv[i] = interp(xq, tq)
    return {
        "t": times,
        "x": xs,
        "S": Sv,
        "R": Rv,
        "c": result.scenario.profile.c(xs),
        "family": family,
    }
