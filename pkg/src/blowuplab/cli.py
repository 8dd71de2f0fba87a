"""Command-line entry points.

Subcommands:

    run     simulate a scenario TOML and write artifacts to --out
    verify  run + full diagnostic suite; exit 1 if any check fails
    oracle  print the comparison-ODE blowup bracket for a scenario family
    sweep   run a parameter sweep and fit the blowup-time scaling law

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 solver error.  Errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import diagnostics, oracles, profiles, solver, sweep

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_SOLVER_ERROR = 3


class ConfigError(RuntimeError):
    pass


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def _parse_value(raw: str):
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    return raw


def _load_scenario(args) -> profiles.Scenario:
    path = Path(args.scenario)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        sc = profiles.load_scenario(path)
    except (profiles.ProfileConstraintError, ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"invalid scenario: {e}") from e

    if args.resolution is not None:
        sc.n_cells = args.resolution
    if args.cfl is not None:
        sc.cfl = args.cfl
    if args.smax is not None:
        sc.s_max = args.smax
    if args.gradient:
        sc.gradient_corun = True
    if args.conservative_xcheck:
        sc.conservative_xcheck = True
    if args.lagrangian:
        sc.lagrangian_check = True
    for item in args.override or []:
        if "=" not in item:
            raise ConfigError(f"--override expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        if not hasattr(sc, key):
            raise ConfigError(f"unknown scenario field in --override: {key!r}")
        setattr(sc, key, _parse_value(raw))
    try:
        sc.validate()
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return sc


def _run_diagnostics(result) -> dict:
    out = {}
    out["invariants"] = diagnostics.check_sign_invariants(result).as_dict()
    out["energy"] = diagnostics.compute_energy_ledger(result).as_dict()
    out["finite_propagation"] = diagnostics.check_finite_propagation(result)
    out["simultaneity"] = diagnostics.check_simultaneity(result)
    out["vacuum"] = diagnostics.check_vacuum_signature(result)
    try:
        out["blowup"] = diagnostics.estimate_blowup(result).as_dict()
    except diagnostics.DiagnosticsError as e:
        out["blowup"] = {"error": str(e)}

    sc = result.scenario
    if sc.name == "elastic":
        bracket = oracles.elastic_bracket(sc.epsilon, sc.profile.params["d2"])
    elif sc.name == "duct":
        bracket = oracles.duct_bracket(sc.epsilon, sc.alpha)
    else:
        bracket = oracles.radial_bracket(sc.epsilon, sc.m)
    out["oracle_bracket"] = bracket.as_dict()
    if "t_extrap" in out["blowup"]:
        t = out["blowup"]["t_extrap"]
        out["bracket_check"] = {
            "t_extrap": t,
            "window": [0.95 * bracket.t_upper, 1.2 * bracket.t_lower],
            "passed": 0.95 * bracket.t_upper <= t <= 1.2 * bracket.t_lower,
        }

    if result.gradient is not None:
        from . import gradientvars

        out["c1_monitor"] = gradientvars.c1_blowup_monitor(result)
    if sc.lagrangian_check and sc.name == "elastic":
        from . import lagrangian

        fm = lagrangian.integrate_flowmap(result)
        out["lagrangian_mass"] = lagrangian.mass_identity(result, fm)
        out["lagrangian_wave"] = lagrangian.wave_equation_residual(result, fm)
    if result.conservative is not None:
        out["conservative_xcheck"] = result.conservative
    return out


def cmd_run(args) -> int:
    sc = _load_scenario(args)
    try:
        result = solver.run(sc)
    except (solver.SolverError, FloatingPointError) as e:
        return _fail(EXIT_SOLVER_ERROR, "solver_error", str(e))
    outdir = Path(args.out)
    result.save(outdir)
    report = _run_diagnostics(result)
    with open(outdir / "diagnostics.json", "w") as f:
        json.dump(report, f, indent=2, default=float)
    print(f"{sc.name}: status={result.status} t_end={result.t_end:.6g} -> {outdir}")
    return EXIT_OK


_CHECK_KEYS = (
    "invariants", "energy", "finite_propagation", "simultaneity",
    "vacuum", "bracket_check", "c1_monitor",
)


def cmd_verify(args) -> int:
    sc = _load_scenario(args)
    try:
        result = solver.run(sc)
    except (solver.SolverError, FloatingPointError) as e:
        return _fail(EXIT_SOLVER_ERROR, "solver_error", str(e))
    report = _run_diagnostics(result)
    if args.out:
        outdir = Path(args.out)
        result.save(outdir)
        with open(outdir / "diagnostics.json", "w") as f:
            json.dump(report, f, indent=2, default=float)

    all_ok = True
    for key in _CHECK_KEYS:
        if key not in report:
            continue
        entry = report[key]
        ok = bool(entry.get("passed", False))
        all_ok &= ok
        print(f"[{'PASS' if ok else 'FAIL'}] {key}")
    if sc.lagrangian_check and "lagrangian_mass" in report:
        ok = report["lagrangian_mass"]["max_abs_deviation"] <= 0.05
        all_ok &= ok
        print(f"[{'PASS' if ok else 'FAIL'}] lagrangian_mass")
    return EXIT_OK if all_ok else EXIT_VERIFY_FAILED


def cmd_oracle(args) -> int:
    if args.family == "elastic":
        b = oracles.elastic_bracket(args.epsilon)
    elif args.family == "duct":
        b = oracles.duct_bracket(args.epsilon, args.alpha)
    else:
        b = oracles.radial_bracket(args.epsilon, args.m)
    print(json.dumps(b.as_dict(), indent=2))
    return EXIT_OK


def cmd_sweep(args) -> int:
    eps = [float(v) for v in args.epsilons.split(",")]
    if args.family == "duct":
        cfgs = sweep.duct_sweep_configs(eps, alpha=args.alpha, n_cells=args.resolution or 2000)
    elif args.family == "elastic":
        cfgs = sweep.elastic_sweep_configs(eps, n_cells=args.resolution or 8000)
    else:
        raise ConfigError(f"sweep supports elastic/duct, got {args.family!r}")
    records = sweep.run_sweep(cfgs, args.store, max_workers=args.workers)
    fit = sweep.fit_scaling(
        records,
        lambda r: r.config["profile"]["epsilon"],
        lambda r: r.t_extrap,
    )
    print(json.dumps(
        {"records": [r.as_dict() for r in records], "fit": fit.as_dict()},
        indent=2,
    ))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blowuplab")
    sub = p.add_subparsers(dest="command", required=True)

    def add_run_flags(sp):
        sp.add_argument("scenario", help="scenario TOML file")
        sp.add_argument("--resolution", type=int, default=None, metavar="N")
        sp.add_argument("--cfl", type=float, default=None, metavar="X")
        sp.add_argument("--smax", type=float, default=None, metavar="X")
        sp.add_argument("--gradient", action="store_true")
        sp.add_argument("--conservative-xcheck", action="store_true")
        sp.add_argument("--lagrangian", action="store_true")
        sp.add_argument("--override", action="append", metavar="KEY=VALUE")

    sp = sub.add_parser("run", help="simulate and write artifacts")
    add_run_flags(sp)
    sp.add_argument("--out", required=True, metavar="DIR")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("verify", help="simulate and check every diagnostic")
    add_run_flags(sp)
    sp.add_argument("--out", default=None, metavar="DIR")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("oracle", help="print the ODE blowup bracket")
    sp.add_argument("family", choices=["elastic", "duct", "radial"])
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--m", type=int, default=2)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("sweep", help="blowup-time scaling sweep")
    sp.add_argument("family", choices=["elastic", "duct"])
    sp.add_argument("--epsilons", required=True, help="comma-separated values")
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--resolution", type=int, default=None)
    sp.add_argument("--store", required=True, help="JSONL record store")
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        return _fail(EXIT_CONFIG_ERROR, "config_error", str(e))
    except sweep.SweepError as e:
        return _fail(EXIT_VERIFY_FAILED, "sweep_error", str(e))


if __name__ == "__main__":
    sys.exit(main())
