"""Gradient variables v = S_x / rho, w = R_x / rho.

They satisfy the linear (in v, w) system

    v_t + R v_x = (c'/2c) [(2c/rho + S) v - R w] + ((c''c - c'^2)/4c^2) (S^2 - R^2)/rho
    w_t + S w_x = (c'/2c) [(2c/rho + R) w - S v] + ((c''c - c'^2)/4c^2) (R^2 - S^2)/rho

where rho = 2c/(S - R).  The carrier fields (S, R) are frozen during both
stages of the midpoint step, which keeps the update exactly affine in
(v, w) - a property the tests exercise directly.

The sup norms of (v, w) are the C^1 blowup monitor: the claim under test is
that they diverge together with max S, never before it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["GradientField", "c1_blowup_monitor"]


@dataclass
class GradientField:
    x: np.ndarray
    dx: float
    c: np.ndarray
    A: np.ndarray  # c'/(2c)
    B: np.ndarray  # (c''c - c'^2)/(4c^2)
    v: np.ndarray
    w: np.ndarray
    history: list = field(default_factory=list)

    @classmethod
    def from_scenario(cls, scenario, grid) -> "GradientField":
        x = grid.centers()
        c = scenario.profile.c(x)
        cp = scenario.profile.c_prime(x)
        cs = scenario.profile.c_second(x)
        S0, R0 = scenario.initial_riemann(x)
        rho0 = 2.0 * c / (S0 - R0)
        v0 = np.gradient(S0, x) / rho0
        w0 = np.gradient(R0, x) / rho0
        gf = cls(
            x=x,
            dx=grid.dx,
            c=c,
            A=cp / (2.0 * c),
            B=(cs * c - cp ** 2) / (4.0 * c ** 2),
            v=np.asarray(v0, dtype=float),
            w=np.asarray(w0, dtype=float),
        )
        gf.snapshot(0.0)
        return gf

    def _tendency(self, v, w, S, R):
        dx = self.dx
        n = v.size
        vp = np.empty(n + 2)
        wp = np.empty(n + 2)
        vp[1:-1], wp[1:-1] = v, w
        # plateaus: the fields are constant there, so the gradients vanish
        vp[0] = vp[-1] = 0.0
        wp[0] = wp[-1] = 0.0
        vx = np.where(R > 0.0, vp[1:-1] - vp[:-2], vp[2:] - vp[1:-1]) / dx
        wx = np.where(S > 0.0, wp[1:-1] - wp[:-2], wp[2:] - wp[1:-1]) / dx

        inv_rho = (S - R) / (2.0 * self.c)
        twoc_rho = 2.0 * self.c * inv_rho
        diff2 = S * S - R * R
        dv = -R * vx + self.A * ((twoc_rho + S) * v - R * w) + self.B * inv_rho * diff2
        dw = -S * wx + self.A * ((twoc_rho + R) * w - S * v) - self.B * inv_rho * diff2
        return dv, dw

    def step(self, S, R, dt):
        """Midpoint step with (S, R) frozen: exactly affine in (v, w)."""
        dv1, dw1 = self._tendency(self.v, self.w, S, R)
        v_h = self.v + 0.5 * dt * dv1
        w_h = self.w + 0.5 * dt * dw1
        dv2, dw2 = self._tendency(v_h, w_h, S, R)
        self.v = self.v + dt * dv2
        self.w = self.w + dt * dw2

    def snapshot(self, t):
        self.history.append(
            (float(t), float(np.abs(self.v).max()), float(np.abs(self.w).max()))
        )

    def history_arrays(self):
        arr = np.asarray(self.history)
        return {"t": arr[:, 0], "v_sup": arr[:, 1], "w_sup": arr[:, 2]}


def c1_blowup_monitor(result, frac: float = 0.9, max_gap: int = 2) -> dict:
    """Check that the C^1 norm does not diverge ahead of the L-infinity norm.

    Compares the snapshot index at which sup(|v|, |w|) first reaches `frac`
    of its final peak against the same index for max S; the C^1 crossing
    must not precede the L-infinity crossing by more than `max_gap`
    snapshot intervals.
    """
    if result.gradient is None:
        raise ValueError("run the scenario with gradient_corun enabled")
    h = result.gradient.history_arrays()
    c1 = np.maximum(h["v_sup"], h["w_sup"])
    s_peak = np.array([float(s.S.max()) for s in result.snapshots])
    n = min(len(c1), len(s_peak))
    c1, s_peak = c1[:n], s_peak[:n]
    i_c1 = int(np.argmax(c1 >= frac * c1.max()))
    i_s = int(np.argmax(s_peak >= frac * s_peak.max()))
    return {
        "i_c1": i_c1,
        "i_linf": i_s,
        "c1_lead_intervals": max(0, i_s - i_c1),
        "passed": (i_s - i_c1) <= max_gap,
        "c1_sup_final": float(c1[-1]),
    }
