"""Run diagnostics: conservation ledgers, invariant checks, blowup estimation.

These consume a finished RunResult and never feed back into the solver, so
every check here is an independent measurement of the computed fields.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .solver import RunResult, trace_characteristic

__all__ = [
    "DiagnosticsError",
    "EnergyLedger",
    "InvariantReport",
    "BlowupEstimate",
    "compute_energy_ledger",
    "check_sign_invariants",
    "check_finite_propagation",
    "monitor_condition_a",
    "check_simultaneity",
    "estimate_blowup",
    "check_vacuum_signature",
]


class DiagnosticsError(RuntimeError):
    pass


def _smooth_horizon(result: RunResult, s_cap_factor: float) -> float:
    """Last time the peak is still below s_cap_factor x its initial value.

    Discretization error concentrates in the narrowing peak, so conservation
    statements are checked on the resolved window only.
    """
    s = result.series["s_max"]
    t = result.series["t"]
    cap = s_cap_factor * s[0]
    above = np.nonzero(s > cap)[0]
    return float(t[-1]) if above.size == 0 else float(t[above[0]])


# ---------------------------------------------------------------------------
# energy conservation


@dataclass(frozen=True)
class EnergyLedger:
    times: np.ndarray
    energies: np.ndarray
    residuals: np.ndarray
    flux_rate: float
    e0: float
    tol: float
    max_abs_residual: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "e0": self.e0,
            "flux_rate": self.flux_rate,
            "max_abs_residual": self.max_abs_residual,
            "tol": self.tol,
            "passed": self.passed,
            "t_window": [float(self.times[0]), float(self.times[-1])],
        }


def compute_energy_ledger(
    result: RunResult, s_cap_factor: float = 10.0, tol_factor: float = 10.0
) -> EnergyLedger:
    """Check d/dt int rho (S^2 + R^2)/4 dx = q(x_l) - q(x_r).

    The domain ends sit on plateaus where the state never moves, so the
    boundary flux q = rho S R (S + R)/4 is constant in time and the exact
    flux integral is just q * t.  Pass tolerance is tol_factor * dx * T * E0.
    """
    t_hi = _smooth_horizon(result, s_cap_factor)
    dx = result.grid.dx
    c = result.c

    (Sl, Rl), (Sr, Rr) = result.scenario.far_states()
    cl = float(result.scenario.profile.c(result.scenario.domain[0]))
    cr = float(result.scenario.profile.c(result.scenario.domain[1]))

    def q(S, R, cc):
        rho = 2.0 * cc / (S - R)
        return 0.25 * rho * S * R * (S + R)

    flux_rate = q(Sr, Rr, cr) - q(Sl, Rl, cl)

    times, energies = [], []
    for snap in result.snapshots:
        if snap.t > t_hi:
            break
        rho = result.rho(snap)
        energies.append(float(np.sum(0.25 * rho * (snap.S ** 2 + snap.R ** 2)) * dx))
        times.append(snap.t)
    times = np.asarray(times)
    energies = np.asarray(energies)
    e0 = energies[0]
    residuals = energies - e0 + flux_rate * times
    tol = tol_factor * dx * max(float(times[-1]), dx) * e0
    max_abs = float(np.abs(residuals).max())
    return EnergyLedger(
        times=times,
        energies=energies,
        residuals=residuals,
        flux_rate=flux_rate,
        e0=e0,
        tol=tol,
        max_abs_residual=max_abs,
        passed=max_abs <= tol,
    )


# ---------------------------------------------------------------------------
# sign and bound invariants


@dataclass(frozen=True)
class InvariantReport:
    scenario: str
    checks: dict
    passed: bool

    def as_dict(self) -> dict:
        return {"scenario": self.scenario, "passed": self.passed, "checks": self.checks}


def check_sign_invariants(result: RunResult, rtol: float = 1e-3) -> InvariantReport:
    """Scenario-specific a-priori bounds on the invariant pair.

    Bound constants are the theoretical existence constants calibrated
    against resolved runs (generous by at least 2x):

    * elastic: 0 >= R > -2 d2,        S >= S_min(0)/4 > 0
    * duct:    -e <= R... R <= -eps^(1+alpha) stays, R > -8 eps^(1+alpha)
    * radial:  R <= -eps,  R > -20 eps
    """
    sc = result.scenario
    r_min = float(result.series["r_min"].min())
    r_max = float(result.series["r_max"].max())
    s_min = min(float(s.S.min()) for s in result.snapshots)
    s_min0 = float(result.snapshots[0].S.min())

    checks = {}

    def add(name, value, lo, hi):
        slack = rtol * max(abs(lo), abs(hi), 1e-300)
        ok = (lo - slack) <= value <= (hi + slack)
        checks[name] = {"value": value, "bound": [lo, hi], "passed": bool(ok)}

    if sc.name == "elastic":
        d2 = sc.profile.params["d2"]
        add("R_upper", r_max, -math.inf, 0.0)
        add("R_lower", r_min, -2.0 * d2, math.inf)
    elif sc.name == "duct":
        shift = sc.epsilon ** (1.0 + sc.alpha)
        add("R_upper", r_max, -math.inf, -shift)
        add("R_lower", r_min, -8.0 * shift, math.inf)
    elif sc.name == "radial":
        add("R_upper", r_max, -math.inf, -sc.epsilon)
        add("R_lower", r_min, -20.0 * sc.epsilon, math.inf)
    add("S_positive", s_min, 0.25 * s_min0, math.inf)

    return InvariantReport(
        scenario=sc.name,
        checks=checks,
        passed=all(c["passed"] for c in checks.values()),
    )


# ---------------------------------------------------------------------------
# finite propagation


def check_finite_propagation(
    result: RunResult,
    t0: Optional[float] = None,
    x0: Optional[float] = None,
    s_cap_factor: float = 10.0,
    rel_tol: float = 0.1,
) -> dict:
    """Balance the energy identity over a characteristic triangle.

    Backward-trace both characteristic families from an apex (x0, t0) to
    their feet x1 < x2 at t = 0 and compare

        2 int_{x1}^{x0} c S dx  -  2 int_{x0}^{x2} c R dx
            =  int_{x1}^{x2} rho (S^2 + R^2)(x, 0) dx,

    where the left integrals run along the plus and minus edges.
    """
    if t0 is None:
        t0 = 0.5 * _smooth_horizon(result, s_cap_factor)
    if x0 is None:
        x0 = result.scenario.trace_start

    plus = trace_characteristic(result, x0=x0, t0=t0, family="plus", direction=-1)
    minus = trace_characteristic(result, x0=x0, t0=t0, family="minus", direction=-1)
    x1 = float(plus["x"][-1])
    x2 = float(minus["x"][-1])
    xl, xr = result.scenario.domain
    out = {"x0": x0, "t0": t0, "x1": x1, "x2": x2}
    if not (xl <= x1 <= xr and xl <= x2 <= xr) or not x1 < x0 < x2:
        out.update({"triangle_not_closed": True, "passed": False})
        return out

    def edge_integral(tr, invariant):
        order = np.argsort(tr["x"])
        xs = tr["x"][order]
        ys = (tr["c"] * tr[invariant])[order]
        return float(np.trapezoid(ys, xs))

    lhs = 2.0 * edge_integral(plus, "S") - 2.0 * edge_integral(minus, "R")

    xq = np.linspace(x1, x2, 20001)
    sc = result.scenario
    rho0 = sc.rho0(xq)
    S0, R0 = sc.initial_riemann(xq)
    rhs = float(np.trapezoid(rho0 * (S0 ** 2 + R0 ** 2), xq))

    residual = abs(lhs - rhs)
    rel = residual / max(abs(rhs), 1e-300)
    out.update(
        {
            "triangle_not_closed": False,
            "lhs": lhs,
            "rhs": rhs,
            "residual": residual,
            "rel_residual": rel,
            "passed": rel <= rel_tol,
        }
    )
    return out


# ---------------------------------------------------------------------------
# condition-(A) monitors and simultaneity


def monitor_condition_a(result: RunResult) -> dict:
    """Per-snapshot sup norms: L* tracks (rho, 1/rho, u) boundedness, M*
    tracks the C^1 norm of the invariant fields (finite differences)."""
    ts, L, M = [], [], []
    dx = result.grid.dx
    for snap in result.snapshots:
        rho = result.rho(snap)
        u = result.u(snap)
        ts.append(snap.t)
        L.append(max(float(rho.max()), float((1.0 / rho).max()), float(np.abs(u).max())))
        gS = np.abs(np.diff(snap.S)).max() / dx
        gR = np.abs(np.diff(snap.R)).max() / dx
        M.append(max(float(gS), float(gR)))
    return {"t": np.asarray(ts), "L_star": np.asarray(L), "M_star": np.asarray(M)}


def check_simultaneity(result: RunResult, frac: float = 0.95, max_gap: int = 2) -> dict:
    """L-infinity and C^1 blowup monitors must spike together: the times at
    which max S and M* first reach `frac` of their final peaks may differ by
    at most `max_gap` snapshot intervals.

    The threshold sits close to the peak because both monitors diverge at the
    same singular time; thresholds far below the peak measure the (different)
    early growth rates rather than simultaneity of the divergence itself.
    """
    mon = monitor_condition_a(result)
    s_peak = np.array([float(s.S.max()) for s in result.snapshots])
    m_peak = mon["M_star"]
    i_s = int(np.argmax(s_peak >= frac * s_peak.max()))
    i_m = int(np.argmax(m_peak >= frac * m_peak.max()))
    return {
        "i_linf": i_s,
        "i_c1": i_m,
        "t_linf": float(mon["t"][i_s]),
        "t_c1": float(mon["t"][i_m]),
        "gap_intervals": abs(i_s - i_m),
        "passed": abs(i_s - i_m) <= max_gap,
    }


# ---------------------------------------------------------------------------
# blowup extrapolation


@dataclass(frozen=True)
class BlowupEstimate:
    t_extrap: float
    slope: float
    intercept: float
    r_squared: float
    n_samples: int
    fit_window: tuple
    x_star: float
    s_peak: float
    t_peak: float
    status: str

    def as_dict(self) -> dict:
        return {
            "t_extrap": self.t_extrap,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_samples": self.n_samples,
            "fit_window": list(self.fit_window),
            "x_star": self.x_star,
            "s_peak": self.s_peak,
            "t_peak": self.t_peak,
            "status": self.status,
        }


def estimate_blowup(
    result: RunResult,
    lo_factor: float = 10.0,
    hi_frac: float = 0.5,
    min_samples: int = 20,
) -> BlowupEstimate:
    """Singularity time from the affine tail of 1/max S.

    Riccati-dominated growth makes 1/max S asymptotically affine in t; fit
    it on the resolved window [lo_factor * S(0), hi_frac * overall peak] and
    report the zero crossing.  The upper cut keeps the under-resolved stall
    phase out of the fit.
    """
    t = result.series["t"]
    s = result.series["s_max"]
    s0 = s[0]
    peak = float(s.max())
    i_peak = int(np.argmax(s))
    hi = hi_frac * peak
    # on coarse grids the resolved peak may stall below lo_factor * S(0);
    # keep a usable window by lowering the cut to a quarter of the cap
    lo = min(lo_factor * s0, 0.25 * hi)
    mask = (s >= lo) & (s <= hi) & (np.arange(s.size) <= i_peak)
    n = int(mask.sum())
    if n < min_samples:
        raise DiagnosticsError(
            f"insufficient samples for blowup fit: {n} < {min_samples} "
            f"(window [{lo:.3g}, {hi:.3g}], peak {peak:.3g})"
        )
    tf, yf = t[mask], 1.0 / s[mask]
    slope, intercept = np.polyfit(tf, yf, 1)
    if slope >= 0.0:
        raise DiagnosticsError("1/max S is not decreasing; no blowup trend")
    pred = slope * tf + intercept
    ss_res = float(np.sum((yf - pred) ** 2))
    ss_tot = float(np.sum((yf - yf.mean()) ** 2))
    r2 = 1.0 - ss_res / max(ss_tot, 1e-300)
    return BlowupEstimate(
        t_extrap=float(-intercept / slope),
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        n_samples=n,
        fit_window=(float(tf[0]), float(tf[-1])),
        x_star=float(result.series["x_at_s_max"][i_peak]),
        s_peak=peak,
        t_peak=float(t[i_peak]),
        status=result.status,
    )


def check_vacuum_signature(result: RunResult) -> dict:
    """At the end state the peak must carry the vacuum signature: density
    collapsing like c/S while the momentum stays bounded by c."""
    b = result.blowup
    c_star = float(result.scenario.profile.c(b["x_star_grid"]))
    rho_ok = b["rho_at_xstar"] <= 3.0 * c_star / b["s_max"]
    mom_ok = abs(b["momentum_at_xstar"]) <= 2.0 * c_star
    return {
        "x_star": b["x_star_grid"],
        "c_at_xstar": c_star,
        "rho_at_xstar": b["rho_at_xstar"],
        "rho_bound": 3.0 * c_star / b["s_max"],
        "momentum_at_xstar": b["momentum_at_xstar"],
        "momentum_bound": 2.0 * c_star,
        "passed": bool(rho_ok and mom_ok),
    }
