"""Comparison-ODE blowup brackets.

Each scenario's gradient growth is sandwiched between two scalar Riccati-type
ODEs; their blowup times bracket the PDE blowup time.  The brackets here are
computed numerically with scipy's integrator (plus closed forms where they
exist) and are independent of the PDE solver: they never touch grid data.

All bracket solves run a self-check first: integrating dg/dt = g^2, g(0) = 1
must blow up at t = 1 within 1e-4, otherwise the oracle refuses to report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "OdeBracket",
    "elastic_lower_ode",
    "elastic_upper_ode",
    "duct_lower_ode",
    "duct_upper_ode",
    "duct_bracket",
    "elastic_bracket",
    "radial_bracket",
    "off_core_noblowup_bound",
    "blowup_time_of_ode",
]

_G_BIG = 1.0e6  # "infinity" for the escape event


def blowup_time_of_ode(rhs, g0: float, t_max: float, rtol: float = 1e-10) -> float:
    """Blowup time of dg/dt = rhs(t, g), g(0) = g0 > 0.

    Integrates until g escapes to _G_BIG, then extrapolates the remaining
    (asymptotically pure-Riccati) tail.  Returns inf if no escape by t_max.
    """

    def event(t, y):
        return y[0] - _G_BIG

    event.terminal = True
    event.direction = 1.0

    sol = solve_ivp(
        lambda t, y: [rhs(t, y[0])],
        (0.0, t_max),
        [g0],
        rtol=rtol,
        atol=1e-12,
        events=event,
        dense_output=False,
        max_step=t_max / 50.0,
    )
    if sol.t_events[0].size == 0:
        return math.inf
    t_hit = float(sol.t_events[0][0])
    g_hit = float(sol.y_events[0][0][0])
    # tail: dg/dt ~ k g^2 with k frozen at t_hit, so remaining time = 1/(k g)
    k = rhs(t_hit, g_hit) / g_hit ** 2
    return t_hit + 1.0 / (k * g_hit)


def _self_check():
    t = blowup_time_of_ode(lambda t, g: g * g, 1.0, 10.0)
    if abs(t - 1.0) > 1e-4:
        raise RuntimeError(f"ODE integrator self-check failed: got {t!r}, want 1.0")


@dataclass(frozen=True)
class OdeBracket:
    """Lower/upper blowup-time bracket with the closed forms used to verify it."""

    scenario: str
    t_lower: float
    t_upper: float
    g0_lower: float
    g0_upper: float
    params: dict
    closed_form_lower: Optional[float] = None
    closed_form_upper: Optional[float] = None

    def contains(self, t: float, slack_lo: float = 1.0, slack_hi: float = 1.0) -> bool:
        return self.t_upper * slack_lo <= t <= self.t_lower * slack_hi

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "t_lower": self.t_lower,
            "t_upper": self.t_upper,
            "g0_lower": self.g0_lower,
            "g0_upper": self.g0_upper,
            "closed_form_lower": self.closed_form_lower,
            "closed_form_upper": self.closed_form_upper,
            "params": self.params,
        }


# ---------------------------------------------------------------------------
# elastic


def elastic_lower_ode(epsilon: float) -> float:
    """Blowup time of the slow elastic comparison ODE

        dg/dt = eps / (4 (1 + a eps t - eps)) * (g^2 - a^2),
        g(0) = 2 eps / (1 - eps),   a = eps / (2 (1 - eps)).

    Cross-checked against the closed form 32 (1 - eps)^2 / (9 eps^2) and the
    implicit time relation before returning.
    """
    _self_check()
    eps = float(epsilon)
    a = eps / (2.0 * (1.0 - eps))
    g0 = 2.0 * eps / (1.0 - eps)

    def rhs(t, g):
        return eps / (4.0 * (1.0 + a * eps * t - eps)) * (g * g - a * a)

    closed = 32.0 * (1.0 - eps) ** 2 / (9.0 * eps ** 2)
    t_num = blowup_time_of_ode(rhs, g0, 3.0 * closed)
    if not math.isfinite(t_num) or abs(t_num - closed) > 1e-3 * closed:
        raise RuntimeError(
            f"elastic lower ODE disagrees with closed form: {t_num} vs {closed}"
        )
    # implicit relation satisfied by the exact solution at blowup:
    # 2 ln((g0+a)/(g0-a)) + ln(1-eps) = ln(1 + a eps t* - eps)
    lhs = 2.0 * math.log((g0 + a) / (g0 - a)) + math.log(1.0 - eps)
    rhs_val = math.log(1.0 + a * eps * closed - eps)
    if abs(lhs - rhs_val) > 1e-12 * max(1.0, abs(lhs)):
        raise RuntimeError("elastic implicit blowup relation violated")
    return t_num


def elastic_upper_ode(epsilon: float, d2: float, g0: Optional[float] = None) -> float:
    """Pure-Riccati upper comparison dg/dt = (d2/2) g^2 => t = 2/(d2 g0)."""
    _self_check()
    eps = float(epsilon)
    if g0 is None:
        g0 = 2.0 * eps / (1.0 - eps)  # max initial invariant, attained at x = 1
    closed = 2.0 / (d2 * g0)
    t_num = blowup_time_of_ode(lambda t, g: 0.5 * d2 * g * g, g0, 3.0 * closed)
    if abs(t_num - closed) > 1e-3 * closed:
        raise RuntimeError("elastic upper ODE disagrees with closed form")
    return closed


def elastic_bracket(epsilon: float, d2: Optional[float] = None) -> OdeBracket:
    eps = float(epsilon)
    if d2 is None:
        d2 = 1.0 / ((1.0 - eps) / eps - 0.5 * eps ** 5)
    g0 = 2.0 * eps / (1.0 - eps)
    return OdeBracket(
        scenario="elastic",
        t_lower=elastic_lower_ode(eps),
        t_upper=elastic_upper_ode(eps, d2),
        g0_lower=g0,
        g0_upper=g0,
        params={"epsilon": eps, "a": eps / (2.0 * (1.0 - eps)), "d2": d2},
        closed_form_lower=32.0 * (1.0 - eps) ** 2 / (9.0 * eps ** 2),
        closed_form_upper=2.0 / (d2 * g0),
    )


# ---------------------------------------------------------------------------
# duct


def duct_lower_ode(epsilon: float, alpha: float, delta3: Optional[float] = None) -> float:
    """Blowup time of the slow duct comparison ODE

        dg/dt = (eps^alpha / 16) g^2 - (eps^alpha / 8) delta3^2,
        g(0) = 6 - eps^(alpha+1).

    delta3 defaults to eps^(1+alpha) (drift cap constant K6 = 1).
    """
    _self_check()
    eps, ea = float(epsilon), float(epsilon) ** alpha
    if delta3 is None:
        delta3 = eps ** (1.0 + alpha)
    g0 = 6.0 - eps ** (alpha + 1.0)

    def rhs(t, g):
        return ea / 16.0 * g * g - ea / 8.0 * delta3 ** 2

    rough = 16.0 / (ea * g0)
    t_num = blowup_time_of_ode(rhs, g0, 10.0 * rough)
    # closed form: g' = k (g^2 - b^2) from g0 > b blows up at acoth(g0/b)/(k b)
    k, b = ea / 16.0, math.sqrt(2.0) * delta3
    t_closed = math.atanh(b / g0) / (k * b) if b > 0 else 1.0 / (k * g0)
    if abs(t_num - t_closed) > 1e-3 * t_closed:
        raise RuntimeError(
            f"duct lower ODE disagrees with closed form: {t_num} vs {t_closed}"
        )
    return t_num


def duct_upper_ode(epsilon: float, alpha: float) -> float:
    """Fast duct comparison dg/dt = (eps^alpha / 8) g^2 => t = 8/(eps^alpha g0)."""
    _self_check()
    eps, ea = float(epsilon), float(epsilon) ** alpha
    g0 = 6.0 - eps ** (alpha + 1.0)
    closed = 8.0 / (ea * g0)
    t_num = blowup_time_of_ode(lambda t, g: ea / 8.0 * g * g, g0, 3.0 * closed)
    if abs(t_num - closed) > 1e-3 * closed:
        raise RuntimeError("duct upper ODE disagrees with closed form")
    return closed


def duct_bracket(epsilon: float, alpha: float, delta3: Optional[float] = None) -> OdeBracket:
    eps, ea = float(epsilon), float(epsilon) ** alpha
    g0 = 6.0 - eps ** (alpha + 1.0)
    return OdeBracket(
        scenario="duct",
        t_lower=duct_lower_ode(eps, alpha, delta3),
        t_upper=duct_upper_ode(eps, alpha),
        g0_lower=g0,
        g0_upper=g0,
        params={"epsilon": eps, "alpha": alpha,
                "delta3": eps ** (1.0 + alpha) if delta3 is None else delta3},
        closed_form_lower=None,
        closed_form_upper=8.0 / (ea * g0),
    )


def off_core_noblowup_bound(epsilon: float, alpha: float) -> float:
    """Time horizon below which trajectories starting off the dense core
    cannot blow up: 8 / eps^(1 + 2 alpha)."""
    return 8.0 / float(epsilon) ** (1.0 + 2.0 * alpha)


# ---------------------------------------------------------------------------
# radial


def radial_bracket(epsilon: float, m: int) -> OdeBracket:
    """Generic Riccati bracket on the radial core near x = 2.

    The growth coefficient c'/(4c) on the core lies in [m/(4*3), m/4] for
    m in {1, 2} (c = x^m on [1, 3]), so dg/dt = k g^2 with k at the two
    extremes brackets the blowup time from g0 = 2 c(2) - eps.
    """
    _self_check()
    eps = float(epsilon)
    g0 = 2.0 * 2.0 ** m - eps
    k_lo = m / 12.0  # min of c'/(4c) = m/(4x) over [1, 3]
    k_hi = m / 4.0  # max over [1, 3]
    t_slow = blowup_time_of_ode(lambda t, g: k_lo * g * g, g0, 100.0)
    t_fast = blowup_time_of_ode(lambda t, g: k_hi * g * g, g0, 100.0)
    for t_num, k in ((t_slow, k_lo), (t_fast, k_hi)):
        closed = 1.0 / (k * g0)
        if abs(t_num - closed) > 1e-3 * closed:
            raise RuntimeError("radial Riccati disagrees with closed form")
    return OdeBracket(
        scenario="radial",
        t_lower=t_slow,
        t_upper=t_fast,
        g0_lower=g0,
        g0_upper=g0,
        params={"epsilon": eps, "m": m, "k_lower": k_lo, "k_upper": k_hi},
        closed_form_lower=1.0 / (k_lo * g0),
        closed_form_upper=1.0 / (k_hi * g0),
    )
