"""Command line front end.

Two subcommands:

* ``simulate`` runs a single walk and writes its trace and final edge
  profile (CSV, JSON, or SVG).
* ``experiment`` runs one named experiment and writes its report bundle
  (JSON summary, text summary, histogram CSVs).  The process exits 0
  exactly when every check in the report passed.

The seed comes from ``--seed``, falling back to the ``TSRM_SEED``
environment variable, falling back to 12345.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from tsrm_lab import analytics, montecarlo, oracle, svg, walk
from tsrm_lab.errors import UsageError
from tsrm_lab.reports import ExperimentReport
from tsrm_lab.version import __version__

EXPERIMENTS = ("uniformity", "hidden-prob", "scaling", "oracle", "airy-check")
DEFAULT_SEED = 12345


def _seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("TSRM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"TSRM_SEED is not an integer: {env!r}")
    return DEFAULT_SEED


def _parse_ladder(text: str) -> tuple[float, ...]:
    try:
        ladder = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise UsageError(f"bad ladder: {text!r}")
    if len(ladder) < 1:
        raise UsageError("ladder is empty")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise UsageError("ladder levels must increase")
    return ladder


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsrm-lab",
        description="Self-repelling walk simulations and diagnostics.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one walk and dump its trace")
    sim.add_argument("--steps", type=int, default=1000,
                     help="number of walk steps (default 1000)")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--sub", type=int, default=0,
                     help="sub-stream index (default 0)")
    sim.add_argument("--out", type=Path, default=Path("."),
                     help="output directory (default current)")
    sim.add_argument("--format", choices=("csv", "json", "svg"),
                     default="csv")

    exp = sub.add_parser("experiment", help="run one named experiment")
    exp.add_argument("kind", choices=EXPERIMENTS)
    exp.add_argument("--A", type=float, default=None, dest="big_a",
                     help="single level parameter")
    exp.add_argument("--A-ladder", type=str, default=None, dest="a_ladder",
                     help="comma-separated increasing level parameters")
    exp.add_argument("--samples", type=int, default=100000)
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--max-coins", type=int, default=6,
                     help="enumeration depth for the oracle experiment")
    exp.add_argument("--out", type=Path, default=Path("."),
                     help="output directory (default current)")
    exp.add_argument("--format", choices=("json", "text", "both"),
                     default="both")
    return parser


def _cmd_simulate(args) -> int:
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    seed = _seed_from(args)
    trace, profile = walk.run_with_profile(args.steps, seed, sub=args.sub)
    outdir = args.out
    outdir.mkdir(parents=True, exist_ok=True)
    if args.format == "svg":
        (outdir / "trace.svg").write_text(svg.polyline(
            range(len(trace.positions)), trace.positions,
            f"walk trace, seed {seed}", "step", "position"))
        pairs = list(profile.items())
        (outdir / "profile.svg").write_text(svg.step_profile(
            [idx + 0.5 for idx, _ in pairs], [c for _, c in pairs],
            f"edge crossings after {args.steps} steps"))
    elif args.format == "json":
        payload = {
            "seed": seed,
            "sub": args.sub,
            "steps": args.steps,
            "positions": [int(v) for v in trace.positions],
            "heights": [int(v) for v in trace.heights],
            "coin_flags": [int(v) for v in trace.coin_flags],
            "profile": {str(idx): cnt for idx, cnt in profile.items()},
        }
        (outdir / "trace.json").write_text(
            json.dumps(payload, indent=1, sort_keys=True) + "\n")
    else:
        trace.to_csv(outdir / "trace.csv")
        walk.profile_to_csv(profile, outdir / "profile.csv")
    print(f"simulate: wrote {args.format} output to {outdir}")
    return 0


def _oracle_report(args, seed: int) -> ExperimentReport:
    depth = args.max_coins
    law = oracle.enumerate_law(depth)
    report = ExperimentReport("oracle", {
        "seed": seed, "max_coins": depth,
        "big_a": args.big_a,
    })
    report.counts["atoms"] = len(law.entries)
    mass_ok = True
    for k in range(depth + 1):
        mass = law.level_mass(k)
        report.estimates[f"level_mass_{k}"] = float(mass)
        mass_ok = mass_ok and mass == 1
    report.checks["level_masses_exact"] = mass_ok
    outdir = args.out
    outdir.mkdir(parents=True, exist_ok=True)
    law.to_json(outdir / "law_conditional.json")
    if args.big_a is not None:
        joint = oracle.geometric_joint(law, args.big_a)
        joint.to_json(outdir / "law_joint.json")
        total = sum(joint.entries.values())
        report.estimates["joint_mass"] = float(total)
        report.estimates["joint_truncation"] = float(joint.truncation_mass)
        report.checks["joint_mass_plus_truncation_is_one"] = \
            total + joint.truncation_mass == 1
    report.notes.append("law JSON written next to this report")
    return report


def _airy_report(seed: int) -> ExperimentReport:
    gamma_form, slope_form = analytics.hidden_probability_forms()
    quad = analytics.quadrature_check()
    residual = analytics.ode_residual_max()
    report = ExperimentReport("airy-check", {"seed": seed})
    report.constants["hidden_probability_gamma_form"] = gamma_form
    report.constants["hidden_probability_slope_form"] = slope_form
    report.constants["boundary_slope"] = analytics.u_prime0_exact()
    report.estimates["ode_residual_max"] = residual
    for key in ("int_u_squared", "err_u_squared", "int_u_uprime",
                "err_u_uprime", "two_int_uv", "err_two_uv"):
        report.estimates[key] = quad[key]
    report.checks["quadrature_identities"] = quad["passed"]
    report.checks["forms_agree"] = abs(gamma_form - slope_form) < 1e-14
    report.checks["ode_residual_small"] = residual <= 1e-9
    return report


def _cmd_experiment(args) -> int:
    seed = _seed_from(args)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    ladder: tuple[float, ...] = ()
    if args.a_ladder is not None:
        ladder = _parse_ladder(args.a_ladder)
    elif args.big_a is not None:
        if args.big_a < 2.0:
            raise UsageError("--A must be at least 2")
        ladder = (args.big_a,)

    kind = args.kind
    try:
        if kind in ("uniformity", "hidden-prob", "scaling"):
            config = montecarlo.ExperimentConfig(
                seed=seed, samples=args.samples, a_ladder=ladder,
                workers=args.workers, max_coins=args.max_coins)
            driver = {
                "uniformity": montecarlo.uniformity_test,
                "hidden-prob": montecarlo.hidden_probability_mc,
                "scaling": montecarlo.scaling_diagnostics,
            }[kind]
            report = driver(config)
        elif kind == "oracle":
            report = _oracle_report(args, seed)
        else:
            report = _airy_report(seed)
    except ValueError as exc:
        raise UsageError(str(exc))

    outdir = args.out
    outdir.mkdir(parents=True, exist_ok=True)
    base = kind.replace("-", "_")
    written = report.write(outdir, base,
                           json_out=args.format in ("json", "both"),
                           text_out=args.format in ("text", "both"))
    for path in written:
        print(f"wrote {path}")
    status = "PASS" if report.passed else "FAIL"
    print(f"experiment {kind}: {status}")
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_experiment(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
