"""Command-line front end.

    entinv sweep --rho-ee 0.73 --grid 101 -o sweep.csv
    entinv ghz --n 4 --alpha2 0.73 --p 0.1,0.4,0.7,1.0
    entinv experiment --rho-ee 0.31,0.5,0.73 --purity 0.94 --shots 100000 --seed 7
    entinv verify --draws 1000

Exit status: 0 success, 1 a check exceeded its tolerance, 2 bad configuration.
Any long option may also be given in a ``--config`` file as ``key=value``
lines; command-line flags take precedence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .errors import EntinvError
from .experiment import (
    NOISE_MODEL,
    ExperimentConfig,
    SourceModel,
    analytic_invariant,
    default_theta_grid,
    run_experiment,
)
from .ghz import GhzConfig, evolve_and_check
from .invariants import DEFAULT_TOL, InvariantReport
from .tripartite import PurificationAmplitudes, run_sweep, uniform_grid
from .verify import run_all

SEED_ENV = "ENTINV_SEED"

REPORT_COLUMNS = [
    "p", "theta", "rho_ee", "lambda", "regime", "W_S", "W_R", "W_M",
    "I_lhs", "I_rhs", "residual", "stderr_WS", "stderr_WR", "stderr_WM",
]
EXPERIMENT_EXTRA = [
    "stderr_lhs", "stderr_rhs", "I_analytic", "source_rho_ee", "dephasing",
    "white_noise", "shots", "seed", "noise_model",
]
GHZ_COLUMNS = [
    "n", "alpha2", "p_list", "W_M", "W_S", "W_R", "regimes", "I_lhs", "I_rhs",
    "residual", "literal_lhs", "literal_rhs", "literal_residual", "literal_applies",
]


class ConfigError(Exception):
    pass


def fmt(x) -> str:
    """17 significant digits, locale independent; None -> empty field."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def report_row(rep: InvariantReport, theta: float | None = None) -> dict:
    if theta is None:
        theta = math.asin(math.sqrt(rep.p))
    return {
        "p": rep.p, "theta": theta, "rho_ee": rep.rho_ee, "lambda": rep.lam,
        "regime": rep.regime.value, "W_S": rep.W_S, "W_R": rep.W_R, "W_M": rep.W_M,
        "I_lhs": rep.lhs, "I_rhs": rep.rhs, "residual": rep.residual,
        "stderr_WS": rep.stderr_WS, "stderr_WR": rep.stderr_WR, "stderr_WM": rep.stderr_WM,
    }


def write_csv(rows: list[dict], columns: list[str], path: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    if path in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue(), encoding="utf-8")


def write_summary(summary: dict, path: str | None) -> None:
    if path:
        Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def complex_list(text: str) -> list[complex]:
    try:
        return [complex(v.strip().replace(" ", "")) for v in str(text).split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from exc


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None


# ---------------------------------------------------------------- commands

def cmd_sweep(args) -> int:
    if args.amps is not None:
        if len(args.amps) != 4:
            raise ConfigError("--amps needs exactly four values alpha,beta,gamma,delta")
        amp = PurificationAmplitudes(*args.amps)
    else:
        if not 0.0 <= args.rho_ee <= 1.0:
            raise ConfigError(f"--rho-ee must lie in [0, 1], got {args.rho_ee}")
        amp = PurificationAmplitudes.from_rho_ee(args.rho_ee)
    grid = args.p if args.p is not None else uniform_grid(args.grid)
    result = run_sweep(amp, grid, args.tol)
    write_csv([report_row(r) for r in result.reports], REPORT_COLUMNS, args.output)
    write_summary(
        {"command": "sweep", "rows": len(result.reports), "max_residual": result.max_residual,
         "tolerance": args.tol, "ok": result.ok},
        args.summary,
    )
    return 0 if result.ok else 1


def cmd_ghz(args) -> int:
    p_lists = args.p or [[1.0] * args.n]
    rows, ok, worst = [], True, 0.0
    for p_list in p_lists:
        cfg = GhzConfig.from_alpha2(args.n, args.alpha2, p_list, max_n=args.max_n)
        rep = evolve_and_check(cfg, args.tol)
        ok &= rep.ok
        worst = max(worst, rep.residual)
        rows.append({
            "n": cfg.n, "alpha2": cfg.rho_ee, "p_list": ";".join(fmt(p) for p in cfg.p_list),
            "W_M": rep.W_M, "W_S": ";".join(fmt(x) for x in rep.W_S),
            "W_R": ";".join(fmt(x) for x in rep.W_R), "regimes": ";".join(r.value for r in rep.regimes),
            "I_lhs": rep.lhs, "I_rhs": rep.rhs, "residual": rep.residual,
            "literal_lhs": rep.literal_lhs, "literal_rhs": rep.literal_rhs,
            "literal_residual": rep.literal_residual, "literal_applies": rep.literal_applies,
        })
    write_csv(rows, GHZ_COLUMNS, args.output)
    write_summary({"command": "ghz", "rows": len(rows), "max_residual": worst, "tolerance": args.tol, "ok": ok},
                  args.summary)
    return 0 if ok else 1


def cmd_experiment(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.purity is not None and args.dephasing is not None:
        raise ConfigError("give either --purity or --dephasing, not both")
    thetas = tuple(default_theta_grid(args.theta_points))
    rows = []
    for rho_ee in args.rho_ee:
        if args.purity is not None:
            source = SourceModel.with_purity(rho_ee, args.purity, args.white_noise)
        else:
            source = SourceModel(rho_ee, args.dephasing or 0.0, args.white_noise)
        cfg = ExperimentConfig(source, thetas, args.shots, seed)
        target = analytic_invariant(rho_ee)
        for pt in run_experiment(cfg):
            row = report_row(pt.report, pt.theta)
            row.update({
                "stderr_lhs": pt.report.stderr_lhs, "stderr_rhs": pt.report.stderr_rhs,
                "I_analytic": target, "source_rho_ee": rho_ee, "dephasing": source.dephasing_weight,
                "white_noise": source.white_noise_weight, "shots": cfg.shots, "seed": seed,
                "noise_model": NOISE_MODEL,
            })
            rows.append(row)
    write_csv(rows, REPORT_COLUMNS + EXPERIMENT_EXTRA, args.output)
    write_summary({"command": "experiment", "rows": len(rows), "seed": seed, "shots": args.shots,
                   "noise_model": NOISE_MODEL}, args.summary)
    return 0


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    results = run_all(args.draws, seed, args.ghz_draws, args.tol)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("verify: " + ("all checks passed" if ok else "FAILED"))
    write_summary(
        {"command": "verify", "seed": seed, "ok": ok,
         "checks": [{"name": r.name, "max_error": r.value, "threshold": r.threshold, "cases": r.count,
                     "passed": r.passed} for r in results]},
        args.summary,
    )
    return 0 if ok else 1


# ---------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file providing defaults for any long option")
    common.add_argument("-o", "--output", help="CSV output path (default: stdout)")
    common.add_argument("--summary", help="write a JSON summary to this path")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="residual tolerance (default 1e-10)")

    parser = argparse.ArgumentParser(prog="entinv", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="invariant along a p grid for one purification")
    p.add_argument("--rho-ee", type=float, default=0.73, help="|alpha|^2 of a diagonal-system source")
    p.add_argument("--amps", type=complex_list, help="alpha,beta,gamma,delta (complex, e.g. 0.5+0.1j)")
    p.add_argument("--grid", type=int, default=101, help="number of uniform p points in [0, 1]")
    p.add_argument("--p", type=float_list, help="explicit comma-separated p values (overrides --grid)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ghz", parents=[common], help="N-party GHZ conservation check")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha2", type=float, default=0.5)
    p.add_argument("--p", type=float_list, action="append",
                   help="comma-separated p_j (n values); repeat for more configurations")
    p.add_argument("--max-n", type=int, default=8, help="dimension cap on n")
    p.set_defaults(func=cmd_ghz)

    p = sub.add_parser("experiment", parents=[common], help="finite-count emulation of the photonic experiment")
    p.add_argument("--rho-ee", type=float_list, default=[0.31, 0.5, 0.73])
    p.add_argument("--theta-points", type=int, default=19)
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    p.add_argument("--dephasing", type=float, default=None, help="dephasing weight d")
    p.add_argument("--purity", type=float, default=None, help="solve d for this source purity")
    p.add_argument("--white-noise", type=float, default=0.0)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", parents=[common], help="randomized conservation checks")
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--ghz-draws", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise KeyError(name)


def apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Load ``--config`` key=value defaults into the chosen subcommand's parser."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config or not known.command:
        return
    try:
        sub = _subparser(parser, known.command)
    except KeyError:
        return
    try:
        text = Path(known.config).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    actions = {a.dest: a for a in sub._actions if a.option_strings}
    defaults = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{known.config}:{lineno}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        dest = key.lstrip("-").replace("-", "_")
        if dest not in actions or dest in ("config", "help"):
            raise ConfigError(f"{known.config}:{lineno}: unknown key {key!r}")
        action = actions[dest]
        try:
            conv = action.type(value) if action.type else value
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{known.config}:{lineno}: {exc}") from None
        defaults[dest] = [conv] if isinstance(action, argparse._AppendAction) else conv
    sub.set_defaults(**defaults)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    except (ConfigError, EntinvError, ValueError) as exc:
        print(f"entinv: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"entinv: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
