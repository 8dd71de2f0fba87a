"""blowuplab: a numerical laboratory for finite-time gradient blowup in a
1D inhomogeneous Chaplygin-type hyperbolic system."""

__version__ = "0.1.0"

from . import diagnostics, gradientvars, lagrangian, oracles, profiles, riemann, solver, sweep

__all__ = [
    "diagnostics",
    "gradientvars",
    "lagrangian",
    "oracles",
    "profiles",
    "riemann",
    "solver",
    "sweep",
]
