"""``qqbell`` command line: analyze, scan and selftest."""
import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .bounds import singular_spectrum, theorem3_certify
from .optimize import OptimizerConfig, classify_nonlocality, verdict_to_json
from .scan import FAMILY_AXES, Axis, ScanSpec, gnuplot_script, run_scan, write_csv
from .selftest import FAULTS, format_report, run_selftest
from .states import FAMILIES, decompose, family_params, is_physical, load_state, make_state, negativity, purity

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNPHYSICAL = 0, 1, 2, 3
PHYSICAL_TOL = 1e-8

FAMILY_FLAGS = ("x", "y", "theta", "gamma", "p1", "theta1", "theta2")
FAMILY_FIELDS = {
    "example1": ("x", "y"),
    "example2": ("theta", "gamma"),
    "tgx": ("p1", "theta1", "theta2"),
}


class InputError(Exception):
    """Bad input or specification; maps to exit code 2."""


def _add_family_flags(p):
    p.add_argument("--family", choices=sorted(FAMILIES))
    for name in FAMILY_FLAGS:
        p.add_argument(f"--{name}", type=float)


def _add_optimizer_flags(p, default_on):
    p.add_argument("--optimize", action=argparse.BooleanOptionalAction, default=default_on)
    p.add_argument("--starts", type=int, default=64, help="multi-start count (default 64)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9, help="Nelder-Mead simplex tolerance")
    p.add_argument("--max-iters", type=int, default=500)


def _config(args):
    try:
        return OptimizerConfig(n_starts=args.starts, max_iters=args.max_iters, tol=args.tol, seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _given_family_values(args, family, required):
    values = {}
    for name in FAMILY_FIELDS[family]:
        v = getattr(args, name)
        if v is not None:
            values[name] = v
    stray = [n for n in FAMILY_FLAGS if getattr(args, n) is not None and n not in FAMILY_FIELDS[family]]
    if stray:
        raise InputError(f"family {family} does not take --{', --'.join(stray)}")
    missing = [n for n in required if n not in values]
    if missing:
        raise InputError(f"family {family} needs --{', --'.join(missing)}")
    return values


def build_parser():
    parser = argparse.ArgumentParser(prog="qqbell", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qqbell {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="locality certificate and CH maximum of one state")
    src = p.add_argument_group("state source (one of)")
    src.add_argument("--state", help="state JSON file")
    _add_family_flags(src)
    _add_optimizer_flags(p, default_on=True)
    p.add_argument("--backend", choices=("numba", "numpy"))
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", help="grid scan of an example family, written as CSV")
    _add_family_flags(p)
    p.add_argument("--nx", type=int, default=200)
    p.add_argument("--ny", type=int, default=200)
    p.add_argument("--range1", nargs=2, type=float, metavar=("MIN", "MAX"))
    p.add_argument("--range2", nargs=2, type=float, metavar=("MIN", "MAX"))
    p.add_argument("--purity", action="store_true", help="add a purity column")
    p.add_argument("--gnuplot", action="store_true", help="also write OUT.gp")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    _add_optimizer_flags(p, default_on=False)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("selftest", help="run the invariant batteries")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def _load_analyze_state(args):
    if args.state and args.family:
        raise InputError("give either --state or --family, not both")
    if args.state:
        try:
            return load_state(args.state), {"source": os.path.basename(args.state)}
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"cannot read state {args.state}: {exc}") from None
    if not args.family:
        raise InputError("a state source is required (--state or --family)")
    values = _given_family_values(args, args.family, FAMILY_FIELDS[args.family])
    try:
        params = family_params(args.family, values)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return make_state(params), {"family": args.family, **values}


def cmd_analyze(args):
    rho, source = _load_analyze_state(args)
    report = is_physical(rho, PHYSICAL_TOL)
    if not report:
        print(f"qqbell: unphysical state: {report.describe()}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    f = decompose(rho)
    spec = singular_spectrum(f.T)
    locality = theorem3_certify(f, spec)
    out = {
        "input": source,
        "fano": {
            "r_norm": float(np.linalg.norm(f.r)),
            "mu1": spec.mu1,
            "mu2": spec.mu2,
            "mu3": spec.mu3,
        },
        "bound": locality.bound,
        "locality": locality.to_json(),
        "purity": purity(rho),
        "negativity": negativity(rho),
    }
    if args.optimize:
        verdict = classify_nonlocality(f, _config(args), backend=args.backend)
        out.update(verdict_to_json(verdict))
    else:
        out["verdict"] = "certified_local" if locality.certified_local else "undecided"
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _scan_spec(args):
    if not args.family:
        raise InputError("scan needs --family")
    fixed = _given_family_values(args, args.family, ())
    (n1, lo1, hi1), (n2, lo2, hi2) = FAMILY_AXES[args.family]
    for swept in (n1, n2):
        if swept in fixed:
            raise InputError(f"--{swept} is swept in a {args.family} scan; use --range1/--range2")
    lo1, hi1 = args.range1 or (lo1, hi1)
    lo2, hi2 = args.range2 or (lo2, hi2)
    try:
        spec = ScanSpec(
            args.family,
            Axis(lo1, hi1, args.nx),
            Axis(lo2, hi2, args.ny),
            fixed=fixed,
            optimize=args.optimize,
            config=_config(args),
            with_purity=args.purity,
            jobs=max(1, args.jobs),
        )
        # reject out-of-range corners before doing any work
        for u in (lo1, hi1):
            for v in (lo2, hi2):
                if args.family == "example1" and u + v > 1:
                    continue
                family_params(args.family, {**fixed, n1: u, n2: v})
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    return spec


def cmd_scan(args):
    spec = _scan_spec(args)
    t0 = time.perf_counter()
    columns, rows = run_scan(spec)
    write_csv(args.out, columns, rows)
    if args.gnuplot:
        with open(args.out + ".gp", "w") as fh:
            fh.write(gnuplot_script(spec, args.out))
    print(f"qqbell: wrote {len(rows)} rows to {args.out} in {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return EXIT_OK


def cmd_selftest(args):
    reports = run_selftest(seed=args.seed, fault=args.inject_fault)
    sys.stdout.write(format_report(reports, args.seed))
    for rep in reports:
        print(f"suite {rep.name}: {rep.seconds:.3f} s", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"qqbell: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
