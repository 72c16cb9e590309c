"""Command-line front-end.

Subcommands: ``schedule``, ``simulate``, ``bound``, ``estimate``, ``sweep``.
Group indices on the command line use the user's (pre-normalisation) group
numbering; the virtual anchor group never appears in any output.

Exit codes: 0 ok, 2 configuration error, 3 runtime error.  The environment
variable ``AOI_GRR_SEED`` overrides any seed given on the command line or in
a preset.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys


from .errors import AoiGrrError, ConfigError
from .model import SystemSpec, spec_from_config
from .bounds_ipq import theorem1_upper, theorem2_lower
from .bounds_spq import SpqBoundQuery, theorem3_upper
from .mc import estimate_longrun_fraction, estimate_violation
from .schedule import build_schedule
from .sim import Discipline, run
from .sweep import SweepSpec, load_preset, preset_names, run_sweep

TRACE_COLUMNS = ["g", "i", "k", "S_prev", "D", "A", "W", "V", "preempted"]


def _load_spec(path: str) -> SystemSpec:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return spec_from_config(cfg)


def _seed(args_seed: int | None, default: int = 0) -> int:
    env = os.environ.get("AOI_GRR_SEED")
    if env is not None:
        return int(env)
    return default if args_seed is None else args_seed


def _parse_source(text: str) -> tuple[int, int]:
    try:
        g, i = text.split(",")
        return int(g), int(i)
    except ValueError as exc:
        raise ConfigError(f"--source expects 'g,i', got {text!r}") from exc


def _cmd_schedule(args) -> int:
    spec = _load_spec(args.config)
    sched = build_schedule(spec)
    n_rounds = args.rounds if args.rounds is not None else sched.d_tilde
    off = spec.virtual_offset
    print(f"d_tilde={sched.d_tilde} rounds per iteration; n_scale={spec.n_scale}")
    for r in range(n_rounds):
        names = []
        for (g, i) in sched.round_slots(r):
            if spec.is_virtual(g):
                names.append("(anchor)")
            else:
                names.append(f"({g - off},{i})")
        print(f"round {r}: " + " ".join(names))
    return 0


def _cmd_simulate(args) -> int:
    spec = _load_spec(args.config)
    seed = _seed(args.seed)
    trace = run(spec, Discipline(args.discipline), args.iterations, seed, args.policy)
    off = spec.virtual_offset
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for idx in range(trace.n_records()):
            g = int(trace.g[idx])
            if spec.is_virtual(g):
                continue
            writer.writerow([
                g - off, int(trace.i[idx]), int(trace.k[idx]),
                repr(float(trace.S_prev[idx])), repr(float(trace.D[idx])),
                repr(float(trace.A[idx])), repr(float(trace.W[idx])),
                repr(float(trace.V[idx])), int(trace.preempted[idx]),
            ])
    print(f"wrote {args.out}")
    return 0


BOUND_COLUMNS = [
    "discipline", "g", "i", "k", "x",
    "ub_exponent", "ub_prefactor", "ub_probability", "ub_argmin_ell", "ub_theta_star",
    "lb_exponent", "lb_prefactor", "lb_probability", "lb_argmin_ell", "lb_theta_star",
]


def _cmd_bound(args) -> int:
    spec = _load_spec(args.config)
    sched = build_schedule(spec)
    g_user, i = _parse_source(args.source)
    g = spec.user_group(g_user)
    spec.check_source(g, i)
    discipline = Discipline(args.discipline)
    row = {"discipline": discipline.value, "g": g_user, "i": i, "k": args.k, "x": args.x}
    if discipline is Discipline.IPQ:
        ub = theorem1_upper(spec, sched, g, i, args.k, args.x, limit_n=args.limit_n)
        lb = theorem2_lower(spec, sched, g, i, args.k, args.x, eps=args.eps,
                            limit_n=args.limit_n)
        row.update(ub_exponent=ub.exponent, ub_prefactor=ub.prefactor,
                   ub_probability=ub.probability, ub_argmin_ell=ub.argmin_ell,
                   ub_theta_star=ub.theta_star,
                   lb_exponent=lb.exponent, lb_prefactor=lb.prefactor,
                   lb_probability=lb.probability, lb_argmin_ell=lb.argmin_ell,
                   lb_theta_star=lb.theta_star)
    else:
        q = SpqBoundQuery(g, i, args.k, args.x)
        ub = theorem3_upper(spec, sched, q, limit_n=args.limit_n)
        row.update(ub_exponent=ub.exponent, ub_prefactor=ub.prefactor,
                   ub_probability=ub.probability, ub_argmin_ell="",
                   ub_theta_star=ub.theta_star,
                   lb_exponent="n/a", lb_prefactor="", lb_probability="",
                   lb_argmin_ell="", lb_theta_star="")
    writer = csv.DictWriter(sys.stdout, fieldnames=BOUND_COLUMNS)
    writer.writeheader()
    writer.writerow(row)
    return 0


def _cmd_estimate(args) -> int:
    spec = _load_spec(args.config)
    seed = _seed(args.seed)
    g_user, i = _parse_source(args.source)
    g = spec.user_group(g_user)
    discipline = Discipline(args.discipline)
    if args.longrun:
        est = estimate_longrun_fraction(spec, discipline, g, i, args.x,
                                        args.iterations, seed)
    else:
        est = estimate_violation(spec, discipline, g, i, args.k, args.x,
                                 args.reps, seed, threads=args.threads,
                                 policy=args.policy)
    writer = csv.writer(sys.stdout)
    writer.writerow(["p_hat", "ci_low", "ci_high", "reps", "flags"])
    writer.writerow([est.p_hat, est.ci_low, est.ci_high, est.reps,
                     ";".join(est.flags)])
    return 0


def _cmd_sweep(args) -> int:
    if args.preset:
        spec, sweep = load_preset(args.preset)
    else:
        if not args.sweep_config:
            raise ConfigError("either --preset or --sweep-config is required")
        with open(args.sweep_config) as fh:
            payload = json.load(fh)
        spec = spec_from_config(payload["config"])
        sw = payload["sweep"]
        sweep = SweepSpec(
            axis=sw["axis"], values=tuple(sw["values"]),
            discipline=Discipline(sw["discipline"]), x=tuple(sw["x"]),
            k=sw.get("k"), reps=int(sw["reps"]), seed=int(sw["seed"]),
        )
    if args.reps is not None:
        sweep = SweepSpec(axis=sweep.axis, values=sweep.values,
                          discipline=sweep.discipline, x=sweep.x, k=sweep.k,
                          reps=args.reps, seed=sweep.seed,
                          longrun_iterations=sweep.longrun_iterations,
                          threads=args.threads)
    env = os.environ.get("AOI_GRR_SEED")
    if env is not None:
        sweep = SweepSpec(axis=sweep.axis, values=sweep.values,
                          discipline=sweep.discipline, x=sweep.x, k=sweep.k,
                          reps=sweep.reps, seed=int(env),
                          longrun_iterations=sweep.longrun_iterations,
                          threads=sweep.threads)
    rows = run_sweep(sweep, spec, args.out, rr_baseline=not args.no_rr)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoi-grr",
        description="Peak-age violation analysis for generalized round-robin scheduling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="print the iteration's round table")
    p.add_argument("--config", required=True)
    p.add_argument("--rounds", type=int, default=None)
    p.set_defaults(fn=_cmd_schedule)

    p = sub.add_parser("simulate", help="run one trajectory and write a trace CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--discipline", choices=["ipq", "spq"], required=True)
    p.add_argument("--iterations", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--policy", choices=["grr", "rr"], default="grr")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("bound", help="evaluate the analytic bounds at one query")
    p.add_argument("--discipline", choices=["ipq", "spq"], required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--source", required=True, help="g,i (user group numbering)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--limit-n", action="store_true")
    p.set_defaults(fn=_cmd_bound)

    p = sub.add_parser("estimate", help="Monte Carlo violation estimate")
    p.add_argument("--config", required=True)
    p.add_argument("--discipline", choices=["ipq", "spq"], required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--reps", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--policy", choices=["grr", "rr"], default="grr")
    p.add_argument("--longrun", action="store_true")
    p.add_argument("--iterations", type=int, default=2000)
    p.set_defaults(fn=_cmd_estimate)

    p = sub.add_parser("sweep", help="figure-reproduction sweep writing a CSV dataset")
    p.add_argument("--preset", choices=preset_names(), default=None)
    p.add_argument("--sweep-config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--reps", type=int, default=None, help="override preset reps")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--no-rr", action="store_true", help="skip the RR baseline column")
    p.set_defaults(fn=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AoiGrrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
