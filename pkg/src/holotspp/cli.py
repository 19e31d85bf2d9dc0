"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 usage or input error, 3 a
resource cap stopped the computation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import catalog, tspp
from .annihilator import closure_apply_operator, closure_diagonal, closure_sum
from .caps import CapExceeded, ResourceCaps
from .groebner import left_groebner_basis, staircase
from .guess import GuessFalsified, GuessProblem, InsufficientData, guess_recurrences, structure_box
from .ore import (
    DEGREVLEX,
    OperatorSyntaxError,
    TermOrder,
    infer_algebra,
    parse_operator,
    read_operators,
    write_operators,
)
from .pipeline import PROBLEMS, run_binomial_sum_pipeline, run_pipeline
from .table import Region, SequenceTable
from .telescope import AnsatzShape, find_telescoper, verify_telescoper

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _primes(text):
    if text is None:
        return None
    try:
        ps = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None
    if not ps:
        raise argparse.ArgumentTypeError("empty prime list")
    return ps


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text):
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonnegative_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--primes", type=_primes, help="comma-separated primes for modular steps")
    common.add_argument("--cap-seconds", type=_positive_float, help="wall-clock limit")
    common.add_argument("--cap-bytes", type=_positive_int, help="resident memory limit")
    common.add_argument("--cap-degree", type=_positive_int, help="degree limit in eliminations")
    common.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1,
                        help="worker count (computations are sequential and deterministic)")
    common.add_argument("--out", type=Path, help="write the main result here")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="holotspp", description="Holonomic proofs of determinant evaluations.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("enumerate", parents=[common], help="count TSPPs by brute force")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=_nonnegative_int)
    g.add_argument("--n-max", type=_nonnegative_int)

    s = sub.add_parser("det", parents=[common], help="compare determinants with the product formula")
    s.add_argument("--n-max", type=_positive_int, required=True)

    s = sub.add_parser("identities", parents=[common], help="check the cofactor identities exactly")
    s.add_argument("--n-max", type=_positive_int, required=True)
    s.add_argument("--table", type=Path, help="also write the B(n, j) table here")

    s = sub.add_parser("guess", parents=[common], help="guess recurrences from a table")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--table", type=Path)
    src.add_argument("--summand", choices=sorted(catalog.SEQUENCES))
    s.add_argument("--n", type=_positive_int, default=12, help="table size for --summand")
    s.add_argument("--order", type=_nonnegative_int, default=1, help="total shift order of the ansatz")
    s.add_argument("--degree", type=_nonnegative_int, default=1, help="coefficient degree")
    s.add_argument("--method", choices=["modular", "exact"], default="modular")

    s = sub.add_parser("groebner", parents=[common], help="left Gröbner basis of an operator file")
    s.add_argument("input", type=Path)
    s.add_argument("--order", default="degrevlex", help="degrevlex, lex or block(v,...)")

    s = sub.add_parser("closure", parents=[common], help="closure properties of named sequences")
    s.add_argument("operation", choices=["diagonal", "sum", "apply"])
    s.add_argument("--summand", action="append", required=True, choices=sorted(catalog.SEQUENCES))
    s.add_argument("--operator", help="operator for 'apply'")
    s.add_argument("--offset", type=int, default=0, help="offset for 'diagonal'")

    s = sub.add_parser("telescope", parents=[common], help="creative telescoping for a named summand")
    s.add_argument("--summand", required=True, choices=sorted(catalog.SEQUENCES))
    s.add_argument("--shape", default="I=1,K=0,T=0", help="starting ansatz shape")
    s.add_argument("--max-i", type=_positive_int, default=4)
    s.add_argument("--summation", default="j")

    s = sub.add_parser("prove", parents=[common], help="run the proof pipeline")
    s.add_argument("--config", choices=sorted(PROBLEMS) + ["binomial"], default="pascal")
    s.add_argument("--n-max", type=_positive_int, default=12)
    return p


def _caps(args) -> ResourceCaps:
    return ResourceCaps(seconds=args.cap_seconds, memory_bytes=args.cap_bytes, max_degree=args.cap_degree)


def _emit(args, text: str):
    if args.out is not None:
        args.out.write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text.rstrip("\n"))


# ---------------------------------------------------------------------------
# subcommands


def cmd_enumerate(args) -> int:
    if args.n is not None:
        _emit(args, str(tspp.count_tspp_bruteforce(args.n)))
        return EXIT_OK
    lines, ok = [], True
    for n in range(args.n_max + 1):
        c = tspp.count_tspp_bruteforce(n)
        good = c == tspp.nice(n)
        ok &= good
        lines.append(f"{n} {c} {tspp.nice(n)} {'OK' if good else 'FAIL'}")
    _emit(args, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_det(args) -> int:
    lines, ok = [], True
    for n in range(1, args.n_max + 1):
        d = tspp.okada_det(n)
        target = tspp.nice(n) ** 2
        good = d == target
        ok &= good
        lines.append(f"{n} {d} {target} {'OK' if good else 'FAIL'}")
    _emit(args, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_identities(args) -> int:
    report = tspp.verify_identities(args.n_max)
    if args.table is not None:
        SequenceTable(("j", "n"), tspp.b_table(args.n_max)).write(args.table)
    _emit(args, report.text())
    return report.exit_code


def _table_for(args) -> SequenceTable:
    if args.table is not None:
        try:
            return SequenceTable.read(args.table)
        except (OSError, ValueError) as exc:
            raise UsageError(f"{args.table}: {exc}") from None
    vars_, _, _ = catalog.SEQUENCES[args.summand]
    f = catalog.value_function(args.summand)
    region = Region((0,) * len(vars_), (args.n,) * len(vars_))
    return SequenceTable.from_function(vars_, lambda *p: f(p), region)


def cmd_guess(args) -> int:
    table = _table_for(args)
    gp = GuessProblem(table, structure_box(table.arity, args.order), args.degree)
    ops = guess_recurrences(gp, args.method, args.primes, _caps(args))
    if not ops:
        print("no recurrence found", file=sys.stderr)
        return EXIT_FAIL
    G = left_groebner_basis(ops, DEGREVLEX, _caps(args))
    _emit(args, write_operators(G.elements))
    return EXIT_OK


def _read_ops(path: Path):
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    body = "\n".join(line for line in text.splitlines() if not line.strip().startswith("#"))
    alg = infer_algebra(body) if body.strip() else None
    return read_operators(text, alg)


def cmd_groebner(args) -> int:
    ops = _read_ops(args.input)
    if not ops:
        _emit(args, "")
        return EXIT_OK
    order = TermOrder.parse(args.order)
    G = left_groebner_basis(ops, order, _caps(args))
    st = staircase(G)
    dim = st.dimension if st.finite else "infinite"
    _emit(args, f"# basis order={order} standard_monomials={dim}\n" + write_operators(G.elements))
    return EXIT_OK


def cmd_closure(args) -> int:
    descs = [catalog.description(name) for name in args.summand]
    caps = _caps(args)
    if args.operation == "diagonal":
        if len(descs[0].variables) != 2:
            raise UsageError("diagonal needs a bivariate sequence")
        D = closure_diagonal(descs[0], args.offset)
    elif args.operation == "sum":
        if len(descs) != 2:
            raise UsageError("sum needs exactly two --summand options")
        D = closure_sum(descs[0], descs[1], caps)
    else:
        if not args.operator:
            raise UsageError("apply needs --operator")
        L = parse_operator(args.operator, descs[0].algebra)
        D = closure_apply_operator(descs[0], L, caps)
    _emit(args, D.dumps())
    return EXIT_OK


def cmd_telescope(args) -> int:
    D = catalog.description(args.summand)
    if args.summation not in D.variables or len(D.variables) < 2:
        raise UsageError(f"{args.summand} has no summation variable {args.summation!r}")
    try:
        start = AnsatzShape.parse(args.shape, len(D.variables))
    except ValueError as exc:
        raise UsageError(f"--shape: {exc}") from None
    cert = find_telescoper(D.basis, args.summation, max_I=args.max_i, start=start, caps=_caps(args))
    if cert is None:
        print(f"no telescoper with I <= {args.max_i}", file=sys.stderr)
        return EXIT_CAP
    if not verify_telescoper(cert, D.basis):
        print("certificate failed verification", file=sys.stderr)
        return EXIT_FAIL
    _emit(args, cert.dumps())
    return EXIT_OK


def cmd_prove(args) -> int:
    caps = _caps(args)
    if args.config == "binomial":
        report = run_binomial_sum_pipeline(args.n_max, caps, args.primes)
    else:
        report = run_pipeline(PROBLEMS[args.config], args.n_max, caps, args.primes)
    print(report.text())
    if args.out is not None:
        args.out.write_text(report.json() + "\n")
    else:
        print(report.json())
    return report.exit_code


COMMANDS = {
    "enumerate": cmd_enumerate,
    "det": cmd_det,
    "identities": cmd_identities,
    "guess": cmd_guess,
    "groebner": cmd_groebner,
    "closure": cmd_closure,
    "telescope": cmd_telescope,
    "prove": cmd_prove,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except OperatorSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (InsufficientData, GuessFalsified) as exc:
        print(f"guessing failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
