"""Pointwise algebra of the inhomogeneous Chaplygin system.

Conservative variables are (rho, m) with m = rho*u and flux
(rho*u, rho*u^2 - c^2(x)/rho); the geometric source is (0, -c c'/rho).
Characteristic variables are S = u + c/rho and R = u - c/rho, which are
simultaneously the two wave speeds, so strict hyperbolicity reads
S - R = 2c/rho > 0.

Everything here is a pure function of value types (scalars or numpy
arrays broadcast elementwise); no state, no grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Transforms refuse to evaluate below this density instead of clamping:
# silently flooring rho would corrupt blowup-time estimates downstream.
RHO_FLOOR = 1e-12


class VacuumError(ValueError):
    """Raised when a transform is asked to evaluate at/below vacuum."""


@dataclass(frozen=True)
class FluidState:
    """Conservative state: density and momentum density."""

    rho: np.ndarray | float
    m: np.ndarray | float

    @property
    def u(self):
        return self.m / self.rho


@dataclass(frozen=True)
class RiemannPair:
    """Forward/backward characteristic speeds (and Riemann variables)."""

    S: np.ndarray | float
    R: np.ndarray | float


@dataclass(frozen=True)
class EnergyDensityPoint:
    E: np.ndarray | float
    q: np.ndarray | float


def to_riemann(state: FluidState, c) -> RiemannPair:
    """(rho, m) -> (S, R) = (u + c/rho, u - c/rho)."""
    rho = np.asarray(state.rho, dtype=float)
    if np.any(rho <= RHO_FLOOR):
        raise VacuumError("rho at/below vacuum floor; treat as blowup, not algebra")
    u = np.asarray(state.m, dtype=float) / rho
    a = np.asarray(c, dtype=float) / rho
    return RiemannPair(S=u + a, R=u - a)


def from_riemann(pair: RiemannPair, c) -> FluidState:
    """(S, R) -> (rho, m) with rho = 2c/(S-R), u = (S+R)/2."""
    S = np.asarray(pair.S, dtype=float)
    R = np.asarray(pair.R, dtype=float)
    gap = S - R
    if np.any(gap <= 0.0):
        raise VacuumError("S <= R: hyperbolicity lost / vacuum")
    rho = 2.0 * np.asarray(c, dtype=float) / gap
    if np.any(rho <= RHO_FLOOR):
        raise VacuumError("rho at/below vacuum floor")
    u = 0.5 * (S + R)
    return FluidState(rho=rho, m=rho * u)


def source(pair: RiemannPair, c, c_prime):
    """Characteristic-form source: dS = (c'/4c)(S^2-R^2), dR = -dS."""
    dS = (np.asarray(c_prime, dtype=float) / (4.0 * np.asarray(c, dtype=float))) * (
        np.asarray(pair.S) ** 2 - np.asarray(pair.R) ** 2
    )
    return dS, -dS


def conservative_flux(state: FluidState, c):
    """Flux of the conservative form: (rho u, rho u^2 - c^2/rho)."""
    rho = np.asarray(state.rho, dtype=float)
    m = np.asarray(state.m, dtype=float)
    c = np.asarray(c, dtype=float)
    return m, m * m / rho - c * c / rho


def geometric_source(state: FluidState, c, c_prime):
    """Geometric momentum source (0, -c c'/rho)."""
    s_m = -np.asarray(c, dtype=float) * np.asarray(c_prime, dtype=float) / np.asarray(
        state.rho, dtype=float
    )
    return np.zeros_like(s_m), s_m


def energy_density(pair: RiemannPair, rho, c=None) -> EnergyDensityPoint:
    """Energy density and flux in characteristic form.

    E = (1/4) rho (S^2 + R^2), q = (1/4) rho (S^2 R + R^2 S); these agree
    identically with E = rho u^2/2 + c^2/(2 rho), q = rho u^3/2 - c^2 u/(2 rho).
    """
    rho = np.asarray(rho, dtype=float)
    S = np.asarray(pair.S, dtype=float)
    R = np.asarray(pair.R, dtype=float)
    E = 0.25 * rho * (S * S + R * R)
    q = 0.25 * rho * S * R * (S + R)
    return EnergyDensityPoint(E=E, q=q)


def energy_density_conservative(state: FluidState, c) -> EnergyDensityPoint:
    """Same quantities from (rho, m): the (1.4)-style expressions."""
    rho = np.asarray(state.rho, dtype=float)
    u = np.asarray(state.m, dtype=float) / rho
    c = np.asarray(c, dtype=float)
    E = 0.5 * rho * u * u + 0.5 * c * c / rho
    q = 0.5 * u ** 3 * rho - 0.5 * c * c * u / rho
    return EnergyDensityPoint(E=E, q=q)


def entropy_hessian(state: FluidState, c):
    """Hessian of E(rho, m) = m^2/(2 rho) + c^2/(2 rho) and a PD flag.

    Returns (H, positive_definite) with H = [[(m^2+c^2)/rho^3, -m/rho^2],
    [-m/rho^2, 1/rho]]; det H = c^2/rho^4.
    """
    rho = float(np.asarray(state.rho))
    m = float(np.asarray(state.m))
    c = float(np.asarray(c))
    H = np.array(
        [
            [(m * m + c * c) / rho ** 3, -m / rho ** 2],
            [-m / rho ** 2, 1.0 / rho],
        ]
    )
    minor1 = H[0, 0]
    # det H = (m^2 + c^2)/rho^4 - m^2/rho^4 cancels catastrophically when
    # m >> c; the algebraically identical c^2/rho^4 is exact
    det = (c * c) / rho ** 4
    return H, bool(minor1 > 0.0 and det > 0.0)


def duct_transform(rho_bar, c):
    """Cross-section transform rho = c(x) * rho_bar."""
    return np.asarray(c, dtype=float) * np.asarray(rho_bar, dtype=float)


def duct_transform_inverse(rho, c):
    return np.asarray(rho, dtype=float) / np.asarray(c, dtype=float)
