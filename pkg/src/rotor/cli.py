"""``rotor`` command line.

Exit codes: 0 success, 1 not found / expectation mismatch, 2 configuration
error, 3 numerical error at run time.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Sequence

from . import claims as claims_mod
from .config import BUNDLED, ConfigError, ScenarioConfig, bundled, load
from .dynamics import analytic_variant, drift_report, recurrence_error, simulate, theta_advance, with_potential, write_csv
from .integrals import resolve
from .model import SingularEvaluationError
from .superintegrability import certify_rank, conservation_scan, resonance_detect

EXIT_OK, EXIT_NOT_FOUND, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _scenario(args) -> ScenarioConfig:
    if args.scenario and args.config:
        raise ConfigError("<arguments>", "give either --config or --scenario, not both")
    if args.scenario:
        return bundled(args.scenario)
    if args.config:
        return load(args.config)
    raise ConfigError("<arguments>", "one of --config or --scenario is required")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _variant(cfg: ScenarioConfig) -> str:
    variant = analytic_variant(cfg.potential)
    if variant is None:
        raise ConfigError("potential.variant", f"{cfg.potential.variant} has no exact bracket algebra here")
    return variant


def cmd_simulate(args) -> int:
    cfg = _scenario(args)
    run = cfg.run
    traj = simulate(
        cfg.potential,
        cfg.parameters,
        cfg.initial_state,
        dt=run.dt,
        t_final=run.t_final,
        sample_stride=run.sample_stride,
        tracked=run.tracked,
        method=run.method,
    )
    out, close = _open_out(args.out)
    try:
        write_csv(traj, out)
    finally:
        if close:
            out.close()
    log = sys.stderr if out is sys.stdout else sys.stdout
    print(f"scenario {cfg.name}: {cfg.potential.variant}, {run.method}, dt={traj.meta['dt']:.6g}, "
          f"t_final={run.t_final:.17g}, samples={len(traj)}", file=log)
    if run.tracked:
        print(drift_report(traj).summary(), file=log)
    if run.period is not None:
        print(f"recurrence error at t={run.period:.17g}: {recurrence_error(traj, run.period):.3e}", file=log)
        revolutions = theta_advance(traj, run.period) / (2 * math.pi)
        print(f"rotor revolutions over that time: {revolutions:.12f}", file=log)
    return EXIT_OK


def cmd_verify_algebra(args) -> int:
    cfg = _scenario(args)
    if not cfg.parameters.exact:
        raise ConfigError("parameters", "exact verification needs rational parameters (give omega, not an irrational k/M)")
    variant = _variant(cfg)
    results = claims_mod.run_claims(cfg.parameters, gravity=variant == "gravity")
    doc = claims_mod.report(cfg.parameters, results, variant)
    out, close = _open_out(args.out)
    try:
        out.write(claims_mod.dumps(doc))
    finally:
        if close:
            out.close()
    summary = doc["summary"]
    log = sys.stderr if out is sys.stdout else sys.stdout
    print(f"{summary['passed']}/{summary['total']} claims pass", file=log)
    for r in results:
        if not r.passed:
            print(f"FAIL {r.claim_id}: {r.details}", file=log)
    return EXIT_OK if summary["failed"] == 0 else EXIT_NOT_FOUND


def cmd_rank(args) -> int:
    cfg = _scenario(args)
    variant = _variant(cfg)
    analysis = cfg.analysis
    params = with_potential(cfg.parameters, cfg.potential)
    state = analysis.state or cfg.initial_state
    try:
        observables = {name: resolve(name, params, variant) for name in analysis.integrals}
    except (KeyError, ValueError) as exc:
        raise ConfigError("analysis.integrals", str(exc)) from None
    mode = args.mode or analysis.rank_mode
    try:
        report = certify_rank(observables, state, mode, analysis.tolerance)
    except TypeError:
        raise ConfigError("analysis.state", "exact rank needs a rational state with theta = 0") from None
    doc = {"schema": claims_mod.SCHEMA_VERSION, **report.to_dict(), "expected_rank": analysis.expected_rank}
    print(json.dumps(doc, indent=2))
    if analysis.expected_rank is not None and report.rank != analysis.expected_rank:
        return EXIT_NOT_FOUND
    return EXIT_OK


def cmd_scan(args) -> int:
    cfg = _scenario(args)
    analysis = cfg.analysis
    if not analysis.candidates:
        raise ConfigError("analysis.candidates", "no (m, n) candidates to scan")
    t_final = analysis.scan_t_final or cfg.run.t_final
    result = conservation_scan(cfg.potential, cfg.parameters, cfg.initial_state, analysis.candidates, t_final)
    doc = {
        "schema": claims_mod.SCHEMA_VERSION,
        "t_final": t_final,
        "candidates": [
            {"m": m, "n": n, "resonant": r.resonant, "drift": r.drift, "initial_modulus": r.initial_modulus}
            for (m, n), r in result.items()
        ],
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def _real(text: str):
    """Exact for integers and ``p/q``; float otherwise."""
    text = text.strip()
    try:
        return Fraction(text) if "/" in text or text.lstrip("+-").isdigit() else float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def cmd_resonance(args) -> int:
    result = resonance_detect(args.capital_omega, args.omega, args.max_den, args.tol)
    print(json.dumps(result.to_dict(), indent=2))
    return EXIT_OK if result.found else EXIT_NOT_FOUND


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotor", description="Rigid rotors coupled to planar oscillators.")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        p.add_argument("--config", help="scenario TOML file")
        p.add_argument("--scenario", choices=BUNDLED, help="bundled scenario name")

    p = sub.add_parser("simulate", help="integrate a trajectory and write CSV")
    scenario_args(p)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-algebra", help="check every exact bracket claim and write a JSON report")
    scenario_args(p)
    p.add_argument("--out", help="JSON path (default: standard output)")
    p.set_defaults(func=cmd_verify_algebra)

    p = sub.add_parser("rank", help="Jacobian rank of the integral set")
    scenario_args(p)
    p.add_argument("--mode", choices=("exact", "floating"), help="override analysis.rank_mode")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("scan", help="drift of K_{m,n} along the closed-form trajectory")
    scenario_args(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("resonance", help="best rational m/n for Omega/omega")
    p.add_argument("--capital-omega", type=_real, required=True, help="rotor angular velocity p_theta / I")
    p.add_argument("--omega", type=_real, default=Fraction(1), help="orbital frequency (default 1)")
    p.add_argument("--max-den", type=int, default=100, help="largest |n| (default 100)")
    p.add_argument("--tol", type=float, default=1e-9, help="accepted |Omega/omega - m/n| (default 1e-9)")
    p.set_defaults(func=cmd_resonance)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularEvaluationError, FloatingPointError, OverflowError, ZeroDivisionError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
