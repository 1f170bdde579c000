"""Command-line entry point.

Exit codes: 0 success, 2 invalid input or configuration, 3 internal numeric
failure, 4 state not distillable, 5 target fidelity not reached.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .distill import distill_pipeline
from .ensemble import simulate_ensemble
from .errors import NotDistillable, QDistillError, TargetUnreachable
from .geometry import geometry_report
from .inseparability import derive_filter, family_filter, ppt_test
from .qstate import dumps_state, eq10_state, random_mixed, read_state, singlet_fraction, werner_state
from .distill import filter_ensemble
from .tomography import estimate_state, frobenius_error

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_NOT_DISTILLABLE = 4
EXIT_UNREACHABLE = 5

COMMANDS = ("analyze", "geometry", "distill", "simulate", "estimate")


class InputError(Exception):
    pass


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qdistill",
        description="Two-qubit entanglement distillation workbench.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="input_path", metavar="FILE", help="state file (JSON)")
    src.add_argument("--werner", type=float, metavar="F", help="Werner state with singlet weight F")
    src.add_argument("--eq10", type=float, nargs=3, metavar=("C", "D", "P"),
                     help="p|c00+d11><..| + (1-p)|c01+d10><..|")
    src.add_argument("--random", type=int, metavar="SEED", help="random mixed state (4 Haar terms)")
    parser.add_argument("--target", type=float, default=0.9, help="target singlet fraction (default 0.9)")
    parser.add_argument("--steps", type=int, default=50, help="max BBPSSW rounds (default 50)")
    parser.add_argument("--pairs", type=int, default=100_000, help="ensemble size for simulate")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--shots", type=int, default=10_000,
                        help="shots per observable for estimate; 0 means exact expectations")
    parser.add_argument("--workers", type=int, default=1, help="threads for simulate")
    parser.add_argument("--side", choices=("A", "B"), default="B", help="party applying the filter")
    parser.add_argument("--filter", choices=("derived", "family"), default="derived",
                        help="'family' uses the diag(d, c) filter (requires --eq10)")
    parser.add_argument("--out", metavar="FILE", help="output file (default stdout)")
    parser.add_argument("--csv", action="store_true", help="emit CSV instead of the JSON report")
    return parser


def load_input(args):
    try:
        if args.input_path is not None:
            return read_state(args.input_path), f"file:{args.input_path}"
        if args.werner is not None:
            return werner_state(args.werner), f"werner:{args.werner!r}"
        if args.eq10 is not None:
            c, d, p = args.eq10
            return eq10_state(c, d, p), f"eq10:{c!r},{d!r},{p!r}"
        return random_mixed(args.random, 4), f"random:{args.random}"
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def check_config(args):
    if args.command in ("distill", "simulate") and not 0.5 < args.target < 1.0:
        raise InputError(f"--target must lie in (1/2, 1), got {args.target}")
    if args.steps < 0:
        raise InputError("--steps must be >= 0")
    if args.command == "simulate" and args.pairs < 2:
        raise InputError(f"--pairs must be >= 2, got {args.pairs}")
    if args.command == "estimate" and args.shots < 0:
        raise InputError("--shots must be >= 0 (0 = exact)")
    if args.workers < 1:
        raise InputError("--workers must be >= 1")
    if args.filter == "family" and args.eq10 is None:
        raise InputError("--filter family requires --eq10")


def chosen_filter(args):
    if args.filter == "family":
        c, d, _ = args.eq10
        return family_filter(c, d)
    return None


def dump(doc):
    return json.dumps(doc, indent=2) + "\n"


def emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def sibling(path, suffix):
    root, _ = os.path.splitext(path)
    return root + suffix


def cmd_analyze(args, rho, source):
    verdict = ppt_test(rho)
    doc = {
        "command": "analyze",
        "source": source,
        "verdict": "inseparable" if verdict.inseparable else "separable",
        "min_pt_eigenvalue": verdict.min_eigenvalue,
        "singlet_fraction": singlet_fraction(rho).f,
    }
    if verdict.inseparable:
        filt, rotated, sf = derive_filter(rho, side=args.side)
        if filt.is_identity:
            after, p = rotated, 1.0
        else:
            after, p = filter_ensemble(rotated, filt)
        doc["schmidt"] = {"a": sf.a, "b": sf.b}
        doc["filter"] = {
            "side": filt.side,
            "entries": filt.entries.tolist(),
            "identity": filt.is_identity,
            "pass_probability": p,
        }
        doc["singlet_fraction_after_filter"] = singlet_fraction(after).f
    emit(dump(doc), args.out)
    return EXIT_OK


def cmd_geometry(args, rho, source):
    rep = geometry_report(rho)
    if args.csv:
        emit("t1,t2,t3\n" + ",".join(repr(x) for x in rep["d"]) + "\n", args.out)
    else:
        emit(dump({"command": "geometry", "source": source, **rep}), args.out)
    return EXIT_OK


def _write_distill(args, report, source):
    if args.csv:
        if args.out is None:
            emit(report.stages_csv() + "\n" + report.trail_csv(), None)
        else:
            emit(report.stages_csv(), args.out)
            emit(report.trail_csv(), sibling(args.out, ".trail.csv"))
    else:
        emit(dump({"command": "distill", "source": source, **report.to_dict()}), args.out)


def cmd_distill(args, rho, source):
    try:
        report = distill_pipeline(rho, args.target, max_steps=args.steps, side=args.side,
                                  filt=chosen_filter(args))
    except NotDistillable as exc:
        _write_distill(args, exc.report, source)
        print(f"not distillable: {exc}", file=sys.stderr)
        return EXIT_NOT_DISTILLABLE
    except TargetUnreachable as exc:
        _write_distill(args, exc.report, source)
        print(f"target unreachable: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    _write_distill(args, report, source)
    return EXIT_OK


def cmd_simulate(args, rho, source):
    try:
        res = simulate_ensemble(rho, args.pairs, args.target, args.seed, max_steps=args.steps,
                                workers=args.workers, side=args.side, filt=chosen_filter(args))
    except NotDistillable as exc:
        print(f"not distillable: {exc}", file=sys.stderr)
        return EXIT_NOT_DISTILLABLE
    except TargetUnreachable as exc:
        print(f"target unreachable: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    if args.csv:
        lines = ["stage,count"] + [f"{i},{c}" for i, c in enumerate(res.stage_counts)]
        emit("\n".join(lines) + "\n", args.out)
    else:
        doc = {"command": "simulate", "source": source, "seed": args.seed, **res.to_dict(),
               "pipeline": res.report.to_dict()}
        emit(dump(doc), args.out)
    return EXIT_OK


def cmd_estimate(args, rho, source):
    est = estimate_state(rho, args.shots, args.seed)
    summary = {
        "command": "estimate",
        "source": source,
        "shots_per_observable": args.shots,
        "seed": args.seed,
        "frobenius_error": frobenius_error(est.mat, rho.mat),
    }
    if args.out is None:
        sys.stdout.write(dumps_state(est))
        sys.stderr.write(dump(summary))
    else:
        emit(dumps_state(est), args.out)
        sys.stdout.write(dump(summary))
    return EXIT_OK


HANDLERS = {
    "analyze": cmd_analyze,
    "geometry": cmd_geometry,
    "distill": cmd_distill,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        check_config(args)
        rho, source = load_input(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return HANDLERS[args.command](args, rho, source)
    except (QDistillError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
