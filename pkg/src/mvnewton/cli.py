"""Command-line interface.

Subcommands: nodes, interpolate, eval, diff, integrate, convert, and
bench {accuracy, runtime, runge, lebesgue, backends}.  Exit codes:
0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import re
import sys

import numpy as np

from . import _kernels, bench, expressions, polynomials, solver
from .errors import InterpolationError
from .nodes import generate_newton_nodes
from .solver import interpolate_function


class UsageError(Exception):
    """Bad command line; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # accept values like "-1:1" or "-1,0" after flags: no option string
        # here starts with a digit, so anything of the form -<digit>... is data
        self._negative_number_matcher = re.compile(r"^-\.?\d")

    def error(self, message):
        raise UsageError(message)


def _parse_int_range(text: str) -> list:
    """'a:b' or 'a:b:s', inclusive on both ends."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"range must be 'a:b' or 'a:b:s', got {text!r}")
    try:
        numbers = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"range must contain integers, got {text!r}") from None
    step = numbers[2] if len(numbers) == 3 else 1
    if step < 1:
        raise UsageError(f"range step must be positive, got {step}")
    return list(range(numbers[0], numbers[1] + 1, step))


def _parse_int_list(text: str) -> list:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(p) for p in text.split(",")])
    except ValueError:
        raise UsageError(f"expected comma-separated reals, got {text!r}") from None


def _parse_box(text: str, m: int) -> polynomials.Box:
    specs = [p for p in text.split(",") if p.strip()]
    if len(specs) == 1:
        specs = specs * m
    if len(specs) != m:
        raise UsageError(f"box needs 1 or {m} 'a:b' intervals, got {len(specs)}")
    lows, highs = [], []
    for spec in specs:
        parts = spec.split(":")
        if len(parts) != 2:
            raise UsageError(f"box interval must be 'a:b', got {spec!r}")
        try:
            lows.append(float(parts[0]))
            highs.append(float(parts[1]))
        except ValueError:
            raise UsageError(f"box interval must be numeric, got {spec!r}") from None
    return polynomials.Box(np.array(lows), np.array(highs))


@contextlib.contextmanager
def _out_stream(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fp:
            yield fp


def _load_poly(path):
    with open(path) as fp:
        return solver.poly_from_json_dict(json.load(fp))


def _dump_json(data, path):
    with _out_stream(path) as fp:
        json.dump(data, fp, indent=2)
        fp.write("\n")


def _methods_arg(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def cmd_nodes(args) -> int:
    nodeset = generate_newton_nodes(args.m, args.n, args.nodes)
    _dump_json(nodeset.to_json_dict(), args.out)
    return 0


def cmd_interpolate(args) -> int:
    f = expressions.resolve_function(args.fn, args.m)
    nodeset = generate_newton_nodes(args.m, args.n, args.nodes)
    poly = interpolate_function(args.m, args.n, nodeset, f)
    _dump_json(poly.to_json_dict(), args.out)
    if args.verbose:
        print(f"fit residual at nodes: {poly.fit_residual:.3e}",
              file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    poly = _load_poly(args.poly)
    if (args.point is None) == (args.points_csv is None):
        raise UsageError("eval needs exactly one of --point or --points-csv")
    if args.point is not None:
        x = _parse_point(args.point)
        if x.size != poly.m:
            raise UsageError(f"point has {x.size} coordinates, polynomial "
                             f"has m={poly.m}")
        value = _eval_any(poly, x)
        print(format(value, ".17g"))
        return 0
    points = _read_points_csv(args.points_csv, poly.m)
    values = (polynomials.eval_newton_many(poly, points)
              if isinstance(poly, solver.NewtonPoly)
              else polynomials.eval_monomial_many(poly, points))
    with _out_stream(args.out) as fp:
        for v in values:
            fp.write(format(float(v), ".17g") + "\n")
    return 0


def _eval_any(poly, x) -> float:
    if isinstance(poly, solver.NewtonPoly):
        return polynomials.eval_newton(poly, x)
    return polynomials.eval_monomial(poly, x)


def _read_points_csv(path, m) -> np.ndarray:
    rows = []
    with open(path, newline="") as fp:
        for lineno, row in enumerate(csv.reader(fp), start=1):
            if not row:
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise UsageError(f"{path}:{lineno}: non-numeric cell") from None
            if len(rows[-1]) != m:
                raise UsageError(f"{path}:{lineno}: expected {m} columns, "
                                 f"got {len(rows[-1])}")
    if not rows:
        raise UsageError(f"{path}: no points found")
    return np.array(rows)


def cmd_diff(args) -> int:
    poly = _load_poly(args.poly)
    if not isinstance(poly, solver.NewtonPoly):
        raise UsageError("diff requires a Newton-form polynomial")
    x = _parse_point(args.point)
    if x.size != poly.m:
        raise UsageError(f"point has {x.size} coordinates, polynomial has "
                         f"m={poly.m}")
    value = polynomials.partial_derivative(poly, args.dim, x)
    print(format(value, ".17g"))
    return 0


def cmd_integrate(args) -> int:
    poly = _load_poly(args.poly)
    if not isinstance(poly, solver.NewtonPoly):
        raise UsageError("integrate requires a Newton-form polynomial")
    box = _parse_box(args.box, poly.m)
    try:
        value = polynomials.integrate_hypercube(poly, box)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(format(value, ".17g"))
    return 0


def cmd_convert(args) -> int:
    poly = _load_poly(args.poly)
    if not isinstance(poly, solver.NewtonPoly):
        raise UsageError("convert requires a Newton-form polynomial")
    mono = polynomials.newton_to_monomial(poly)
    _dump_json(mono.to_json_dict(), args.out)
    return 0


def cmd_bench_accuracy(args) -> int:
    records = bench.experiment_accuracy(
        _parse_int_range(args.m_range), args.n, args.trials, args.seed,
        _methods_arg(args.methods))
    with _out_stream(args.out) as fp:
        bench.write_records_csv(fp, records)
    return 0


def cmd_bench_runtime(args) -> int:
    records, fits = bench.experiment_runtime(
        _parse_int_range(args.m_range), args.n, args.trials, args.seed,
        _methods_arg(args.methods), time_floor=args.time_floor)
    with _out_stream(args.out) as fp:
        bench.write_records_csv(fp, records)
    stream = sys.stdout if args.out else sys.stderr
    for method, fit in fits.items():
        print(f"fit method={method} p={fit.prefactor:.6g} "
              f"q={fit.exponent:.4f} r2={fit.r_squared:.6f}", file=stream)
    return 0


def cmd_bench_runge(args) -> int:
    degrees = _parse_int_range(args.degrees)
    rows = bench.experiment_runge(args.m, degrees, args.samples, args.seed)
    with _out_stream(args.out) as fp:
        bench.write_runge_csv(fp, rows)
    return 0


def cmd_bench_lebesgue(args) -> int:
    from .nodes import chebyshev_1d, equidistant_1d

    estimates = []
    for n in _parse_int_list(args.n):
        nodes = (chebyshev_1d(n) if args.nodes in ("cheb", "chebyshev")
                 else equidistant_1d(n))
        resolution = args.resolution or max(1000, 100 * (n + 1))
        est = bench.estimate_lebesgue_1d(nodes, resolution, kind=args.nodes)
        estimates.append(est)
    with _out_stream(args.out) as fp:
        bench.write_lebesgue_csv(fp, estimates)
    return 0


def cmd_bench_backends(args) -> int:
    rows = []
    for m, n in zip(_parse_int_list(args.m), _parse_int_list(args.n)):
        rows.extend(bench.experiment_backends(m, n, args.seed,
                                              eval_points=args.points))
    with _out_stream(args.out) as fp:
        bench.write_backend_csv(fp, rows)
    print(f"active backend: {_kernels.BACKEND}", file=sys.stderr)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="mvnewton",
        description="Multivariate Newton interpolation: nodes, solves, "
                    "calculus, and benchmark experiments.",
        epilog="Expression syntax: +, -, *, /, ^ (right-associative, unary "
               "minus binds tighter than a '^' base), sin/cos/exp/sqrt/abs, "
               "pi, variables x1..xm (x, y, z for m <= 3). "
               "Builtins: --fn builtin:runge | builtin:const:C | "
               "builtin:coslak.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("nodes", help="emit a node-set JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nodes", default="cheb",
                   choices=["cheb", "chebyshev", "equi", "equidistant"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_nodes)

    p = sub.add_parser("interpolate", help="interpolate a function")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nodes", default="cheb",
                   choices=["cheb", "chebyshev", "equi", "equidistant"])
    p.add_argument("--fn", required=True,
                   help="expression in x1..xm or builtin:NAME")
    p.add_argument("--out", default=None)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("eval", help="evaluate a polynomial JSON")
    p.add_argument("--poly", required=True)
    p.add_argument("--point", default=None, help="comma-separated reals")
    p.add_argument("--points-csv", default=None,
                   help="CSV with one point per row, m columns")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("diff", help="partial derivative at a point")
    p.add_argument("--poly", required=True)
    p.add_argument("--dim", type=int, required=True, help="1-based dimension")
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("integrate", help="integral over a hypercube")
    p.add_argument("--poly", required=True)
    p.add_argument("--box", required=True,
                   help="per-dimension 'a:b' intervals, comma-separated "
                        "(a single interval is applied to all dimensions)")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("convert", help="Newton form to monomial form")
    p.add_argument("--poly", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_convert)

    b = sub.add_parser("bench", help="experiments")
    bsub = b.add_subparsers(dest="bench_command")

    p = bsub.add_parser("accuracy", help="coefficient recovery errors")
    p.add_argument("--m-range", required=True, help="'a:b' or 'a:b:s'")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", default="pip,lu-cheb,lu-random,inversion")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench_accuracy)

    p = bsub.add_parser("runtime", help="node generation + solve timings")
    p.add_argument("--m-range", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", default="pip,lu-cheb")
    p.add_argument("--time-floor", type=float, default=0.005)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench_runtime)

    p = bsub.add_parser("runge", help="steep-bump approximation study")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--degrees", required=True, help="'a:b:s', e.g. 2:24:2")
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench_runge)

    p = bsub.add_parser("lebesgue", help="1D Lebesgue constant estimates")
    p.add_argument("--n", required=True, help="comma-separated degrees")
    p.add_argument("--nodes", default="cheb",
                   choices=["cheb", "chebyshev", "equi", "equidistant"])
    p.add_argument("--resolution", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench_lebesgue)

    p = bsub.add_parser("backends", help="compiled vs pure-Python kernels")
    p.add_argument("--m", default="8", help="comma-separated dimensions")
    p.add_argument("--n", default="3", help="comma-separated degrees")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench_backends)

    return parser


def cli_main(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InterpolationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
