"""Command-line front end.

Subcommands: eval, grid, validate-gen, check, sample, check-empirical,
reconstruct, roundtrip.  Exit codes are a stable contract: 0 on success or a
passing check, 1 on a failed check or unwritable output, 2 on usage, parse, or
illegal-configuration errors.  Every CSV output starts with a comment line
recording the tool version, the descriptor, and the seed when one applies.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import checks
from . import shock_models as sm
from .descriptors import (
    GENERATOR_CLASS_NAMES,
    parse_copula,
    parse_distribution,
    parse_generator,
    parse_model,
)
from .errors import IllegalModelError, ReconstructionError, ShockcopError
from .generators import validate
from .sampling import (
    empirical_copula,
    read_pairs_csv,
    sample_model,
    sup_distance,
    write_pairs_csv,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise _OutputError(f"cannot write {path}: {exc}") from exc


class _OutputError(Exception):
    pass


def cmd_eval(args) -> int:
    c = parse_copula(args.copula)
    value = c.value(args.u, args.v)
    print(f"{value:.15g}")
    return EXIT_OK


def cmd_grid(args) -> int:
    c = parse_copula(args.copula)
    fh, close = _open_out(args.out)
    try:
        fh.write(f"# shockcop={__version__} descriptor={c.describe()} n={args.n}\n")
        fh.write("u,v,C\n")
        us = np.linspace(0.0, 1.0, args.n + 1)
        for u in us:
            row = c.value_array(np.full(us.shape, u), us)
            for v, val in zip(us, row):
                fh.write(f"{float(u)!r},{float(v)!r},{float(val)!r}\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_validate_gen(args) -> int:
    cls = GENERATOR_CLASS_NAMES[args.cls]
    gen = parse_generator(args.generator, cls)
    report = validate(gen, grid_size=args.grid, tol=args.tol)
    print(f"generator {gen.describe()} as {args.cls}: {report}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_check(args) -> int:
    c = parse_copula(args.copula)
    report = checks.check_copula_axioms(
        c, grid=args.grid, rectangles=args.rectangles, tol=args.tol, seed=args.seed
    )
    _emit_report(report, args)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_sample(args) -> int:
    model = parse_model(args.model)
    pairs = sample_model(model, args.n, args.seed)
    fh, close = _open_out(args.out)
    try:
        write_pairs_csv(fh, pairs, kind="ranks" if args.ranks else "raw", version=__version__)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_check_empirical(args) -> int:
    c = parse_copula(args.against)
    source = sys.stdin if args.infile in (None, "-") else args.infile
    pairs = read_pairs_csv(source)
    emp = empirical_copula(pairs)
    dist = sup_distance(emp, c, grid=args.grid)
    eps = args.eps if args.eps is not None else 4.4 / np.sqrt(pairs.n)
    status = "pass" if dist <= eps else "FAIL"
    print(
        f"sup distance on {args.grid}-grid between {emp.describe()} and "
        f"{c.describe()}: {dist:.6g} (bound {eps:.6g}) [{status}]"
    )
    return EXIT_OK if dist <= eps else EXIT_CHECK_FAILED


def cmd_reconstruct(args) -> int:
    c = parse_copula(args.copula)
    margin_u = parse_distribution(args.fu)
    margin_v = parse_distribution(args.fv)
    report = checks.check_reconstruction(c, margin_u, margin_v, grid_size=args.grid, tol=args.tol)
    _emit_report(report, args)
    if not report.passed:
        return EXIT_CHECK_FAILED
    if args.out:
        model = sm.reconstruct(c, margin_u, margin_v, grid_size=args.grid, tol=args.tol)
        xs = sm.support_grid([margin_u, margin_v], args.points)
        fh, close = _open_out(args.out)
        try:
            fh.write(f"# shockcop={__version__} descriptor={c.describe()} reconstruction\n")
            fh.write("x,f_x,f_y,g1,g2\n")
            g1, g2 = model.coupling.g1, model.coupling.g2
            for x in xs:
                x = float(x)
                fh.write(
                    f"{x!r},{float(model.f_x.cdf(x))!r},{float(model.f_y.cdf(x))!r},"
                    f"{float(g1.cdf(x))!r},{float(g2.cdf(x))!r}\n"
                )
        finally:
            if close:
                fh.close()
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    c = parse_copula(args.copula)
    margin_u = parse_distribution(args.fu)
    margin_v = parse_distribution(args.fv)
    model = sm.reconstruct(c, margin_u, margin_v, grid_size=args.grid, tol=args.tol)
    reinduced = sm.induced_copula(model, resolution=args.resolution)
    dist = sup_distance(reinduced, c, grid=11)
    status = "pass" if dist <= args.eps else "FAIL"
    print(
        f"roundtrip {c.describe()}: reconstructed {model.describe()}; "
        f"re-induced sup distance {dist:.6g} (bound {args.eps:.6g}) [{status}]"
    )
    return EXIT_OK if dist <= args.eps else EXIT_CHECK_FAILED


def _emit_report(report, args) -> None:
    fmt = getattr(args, "format", "text")
    if fmt == "csv":
        print("\n".join(report.csv_rows()))
    else:
        print(report.render_text())
    out = getattr(args, "report_out", None)
    if out:
        fh, close = _open_out(out)
        try:
            fh.write("\n".join(report.csv_rows()) + "\n")
        finally:
            if close:
                fh.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shockcop",
        description="Shock-model copula toolkit: evaluate, validate, sample, reconstruct.",
    )
    parser.add_argument("--version", action="version", version=f"shockcop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a copula at a point")
    p.add_argument("copula")
    p.add_argument("u", type=float)
    p.add_argument("v", type=float)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("grid", help="export C(u,v) on an (n+1)^2 lattice as CSV")
    p.add_argument("copula")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_grid)

    p = sub.add_parser("validate-gen", help="validate a generator against a class")
    p.add_argument("generator")
    p.add_argument("--class", dest="cls", choices=sorted(GENERATOR_CLASS_NAMES), required=True)
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(fn=cmd_validate_gen)

    p = sub.add_parser("check", help="run the copula axiom suite")
    p.add_argument("copula")
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--rectangles", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--report-out", default=None)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("sample", help="draw coupled pairs from a shock model")
    p.add_argument("model")
    p.add_argument("-n", "--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--ranks", action="store_true", help="emit normalized ranks instead of variates")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("check-empirical", help="sup distance of a sample CSV to a copula")
    p.add_argument("--against", required=True)
    p.add_argument("--in", dest="infile", default=None, help="sample CSV (default stdin)")
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--eps", type=float, default=None)
    p.set_defaults(fn=cmd_check_empirical)

    p = sub.add_parser("reconstruct", help="invert a copula + margins into a shock model")
    p.add_argument("copula")
    p.add_argument("--fu", required=True)
    p.add_argument("--fv", required=True)
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--points", type=int, default=41, help="rows in the emitted CDF table")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--report-out", default=None)
    p.set_defaults(fn=cmd_reconstruct)

    p = sub.add_parser("roundtrip", help="reconstruct, re-induce, and compare to the original")
    p.add_argument("copula")
    p.add_argument("--fu", required=True)
    p.add_argument("--fv", required=True)
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--resolution", type=int, default=1 << 16)
    p.set_defaults(fn=cmd_roundtrip)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; preserve both
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except _OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except ReconstructionError as exc:
        print(f"reconstruction failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (IllegalModelError, ShockcopError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
