"""Command-line interface.

Exit codes: 0 implementable / checks pass, 1 violated or infeasible,
2 input error, 3 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

from . import io
from .characterization import check_conic, check_cuts, check_implementable
from .core import AssumptionViolated, Implementable, InequalitiesHold, InfeasibleExPost, reduce
from .flow import format_network, transform
from .fuzz import FAMILIES, KINDS, fuzz
from .generators import GENERATORS
from .lattice import DEFAULT_BUDGET, EnumerationBudgetExceeded, verify_lattice_polyhedron
from .oracle import lp_feasible

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load(path: str, need_interim: bool = True):
    try:
        inst, interim, expost = io.load(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except io.FormatError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if need_interim and interim is None:
        if expost is None:
            raise InputError(f"{path}: no 'interim' section")
        try:
            interim = reduce(inst, expost)
        except InfeasibleExPost as exc:
            raise InputError(f"{path}: expost: {exc}") from exc
    return inst, interim, expost


def _header(out, inst, interim):
    print(f"instance\tsha256:{io.digest(inst, interim)}", file=out)
    print(f"types\t{len(inst.t1)}x{len(inst.t2)}\talternatives\t{len(inst.alternatives)}", file=out)


def cmd_check(args, out) -> int:
    inst, Q, _ = _load(args.file)
    _header(out, inst, Q)
    print(f"mode\t{args.mode}", file=out)
    try:
        verdict = check_implementable(inst, Q, mode=args.mode)
    except AssumptionViolated as exc:
        raise InputError(f"{exc}; use --mode necessary-only") from exc
    if isinstance(verdict, Implementable):
        print("verdict\timplementable", file=out)
        return EXIT_OK
    if isinstance(verdict, InequalitiesHold):
        print("verdict\tinequalities-hold", file=out)
        return EXIT_OK
    print("verdict\tnot-implementable", file=out)
    print(f"certificate\t{verdict.certificate}", file=out)
    if args.all_violations:
        for v in check_conic(inst, Q):
            print(f"violation\t{v}", file=out)
        for ev in check_cuts(inst, Q, mode="all"):
            print(f"violation\t{ev.as_violation()}", file=out)
    return EXIT_VIOLATED


def cmd_implement(args, out) -> int:
    """Without --out, stdout carries only the JSON document so it can be piped."""
    inst, Q, _ = _load(args.file)
    try:
        verdict = check_implementable(inst, Q, mode="full")
    except AssumptionViolated as exc:
        raise InputError(str(exc)) from exc
    if not isinstance(verdict, Implementable):
        _header(out, inst, Q)
        print("verdict\tnot-implementable", file=out)
        print(f"certificate\t{verdict.certificate}", file=out)
        return EXIT_VIOLATED
    text = io.dumps(inst, Q, verdict.witness)
    if not args.out:
        out.write(text)
        return EXIT_OK
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    _header(out, inst, Q)
    print("verdict\timplementable", file=out)
    print(f"written\t{args.out}", file=out)
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    inst, Q, _ = _load(args.file)
    _header(out, inst, Q)
    q = lp_feasible(inst, Q)
    if q is None:
        print("verdict\tnot-implementable", file=out)
        return EXIT_VIOLATED
    print("verdict\timplementable", file=out)
    for k in inst.alternatives:
        for a, b in inst.profiles():
            if q[(k, a, b)]:
                print(f"q\t{k}\t{a}\t{b}\t{q[(k, a, b)]}", file=out)
    return EXIT_OK


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_fuzz(args, out) -> int:
    start = time.perf_counter()
    summary = fuzz(args.trials, args.seed, args.family, args.t1, args.t2, args.alts,
                   tuple(args.kinds.split(",")), jobs=args.jobs)
    print(f"seed\t{args.seed}", file=out)
    print(f"family\t{args.family}", file=out)
    for line in summary.lines():
        print(line, file=out)
    dump = [r for r in summary.results if r.document is not None]
    if args.dump_dir and dump:
        os.makedirs(args.dump_dir, exist_ok=True)
        for r in dump:
            tag = "disagree" if not r.agree else "gap"
            path = os.path.join(args.dump_dir, f"{tag}-trial{r.spec.index}-seed{r.spec.seed}.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(r.document)
            print(f"dumped\t{path}", file=out)
    # timing stays off stdout so reports are byte-identical across runs
    print(f"wall_time_s\t{time.perf_counter() - start:.2f}", file=sys.stderr)
    return EXIT_OK if not summary.disagreements else EXIT_VIOLATED


def cmd_lattice(args, out) -> int:
    if args.generator:
        inst = GENERATORS[args.generator]()
    elif args.file:
        inst, _, _ = _load(args.file, need_interim=False)
    else:
        raise InputError("give an instance file or --generator")
    print(f"instance\tsha256:{io.digest(inst)}", file=out)
    print(f"budget\t{args.budget}\tsamples\t{args.samples}\tseed\t{args.seed}", file=out)
    try:
        report = verify_lattice_polyhedron(inst, args.budget, args.samples, args.seed)
    except EnumerationBudgetExceeded as exc:
        print(f"error\t{exc}", file=out)
        return EXIT_BUDGET
    for line in report.lines():
        print(line, file=out)
    print(f"result\t{'PASS' if report.passed else 'FAIL'}", file=out)
    return EXIT_OK if report.passed else EXIT_VIOLATED


def cmd_network(args, out) -> int:
    inst, Q, _ = _load(args.file)
    if len(inst.t1) != 2 and len(inst.t2) == 2:
        inst, Q = inst.swapped(), Q.swapped()
        print("# players swapped: player 2 has the binary type space", file=out)
    try:
        p = transform(inst, Q)
    except AssumptionViolated as exc:
        raise InputError(str(exc)) from exc
    print(format_network(p), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="redform", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide implementability with the inequality system")
    p.add_argument("file")
    p.add_argument("--mode", choices=("full", "necessary-only"), default="full")
    p.add_argument("--all-violations", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("implement", help="construct an implementing ex post rule")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_implement)

    p = sub.add_parser("oracle", help="decide implementability by exact LP feasibility")
    p.add_argument("file")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fuzz", help="cross-check characterization against the LP oracle")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", choices=FAMILIES, default="random")
    p.add_argument("--t1", type=_int_list, default=(2,), help="player-1 type counts, e.g. 2 or 3")
    p.add_argument("--t2", type=_int_list, default=(2, 3, 4), help="comma list, e.g. 2,3,4")
    p.add_argument("--alts", type=_int_list, default=(2, 3, 4), help="comma list of |K|")
    p.add_argument("--kinds", default=",".join(KINDS))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--dump-dir")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("lattice", aliases=["lattice-verify"],
                       help="verify the lattice-polyhedron conditions of the cut system")
    p.add_argument("file", nargs="?")
    p.add_argument("--generator", choices=sorted(GENERATORS))
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("network", help="dump the transformed transportation network")
    p.add_argument("file")
    p.set_defaults(func=cmd_network)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
