"""Command-line front end.

Exit status is 0 on success, 1 when a computation or validation fails and
2 on usage errors. Errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from numbers import Integral, Real

from . import __version__
from .errors import PlanarGeoError, UsageError

CSV_SCHEMA = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_rational(text: str) -> Fraction:
    """``"1/24"`` or a decimal such as ``"0.1"``, converted exactly."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational or decimal number: {text!r}") from None


def _parse_bindings(items):
    """``name=VALUE`` binds a number; ``name=var`` or ``name=var*SCALE`` binds formally.

    A right-hand side that parses as a number is numeric; everything else is
    a formal variable, optionally with a rational scale after ``*``.
    """
    from .models import formal, numeric

    out = {}
    for item in items or []:
        name, sep, rhs = item.partition("=")
        if not sep or not name or not rhs:
            raise UsageError(f"binding must look like name=value, got {item!r}")
        try:
            out[name] = numeric(str(Fraction(rhs)))
            continue
        except (ValueError, ZeroDivisionError):
            pass
        var, star, scale = rhs.partition("*")
        if not var.isidentifier():
            raise UsageError(f"bad formal variable in {item!r}")
        out[name] = formal(var, str(_parse_rational(scale)) if star else 1)
    return out


def _parse_values(items) -> dict[str, float]:
    out = {}
    for item in items or []:
        name, sep, rhs = item.partition("=")
        if not sep:
            raise UsageError(f"value must look like name=number, got {item!r}")
        out[name] = float(_parse_rational(rhs))
    return out


def _model(args):
    from .closedform import constellation3_hexavalent
    from .models import CATALOG, model_by_name

    bindings = _parse_bindings(args.bind)
    if args.model == "constellation3_hexa":
        return constellation3_hexavalent(bindings or None)
    if args.model not in CATALOG:
        raise UsageError(f"unknown model {args.model!r}; choose from "
                         f"{sorted(CATALOG) + ['constellation3_hexa']}")
    return model_by_name(args.model, bindings or None)


def _csv(header: list[str], rows, kind: str) -> str:
    buf = io.StringIO()
    buf.write(f"# planargeo {kind} csv schema={CSV_SCHEMA} version={__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, Real) and not isinstance(v, Integral):
        return repr(float(v))
    return str(v)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands --------------------------------------------------------------

def cmd_derive(args) -> int:
    from .qoperator import build_recursion_system

    eqs = build_recursion_system(_model(args))
    text = "\n".join(e.pretty() for e in eqs) + "\n\nsolved form:\n"
    _emit(text + "\n".join(e.solved() for e in eqs) + "\n", args.output)
    return 0


def cmd_solve(args) -> int:
    from .recursion import residual, solve_sequences

    fam = solve_sequences(_model(args), args.cutoff, args.n_max)
    if args.check and residual(fam) != 0:
        raise PlanarGeoError("solved family does not satisfy its equations")
    if args.format == "json":
        text = json.dumps(fam.to_dict(), sort_keys=True) + "\n"
    else:
        rows = []
        for n in range(min(fam.n_max, args.rows) + 1):
            for name in fam.names:
                s = fam[(name, n)]
                for mono, c in sorted(s.terms.items()):
                    rows.append((name, n, " ".join(map(str, mono)), str(c)))
        text = _csv(["sequence", "n", "exponents", "coefficient"], rows, "series")
    _emit(text, args.output)
    return 0


def cmd_closedform(args) -> int:
    from .closedform import comparison_table

    model = _model(args)
    values = _parse_values(args.at)
    rows = comparison_table(model, values, cutoff=args.cutoff, ns=range(args.n_upto + 1),
                            name=args.sequence)
    _emit(_csv(["n", "closed", "series", "abs_diff"], rows, "closedform"), args.output)
    worst = max(r[3] for r in rows)
    if args.tolerance is not None and worst > args.tolerance:
        raise PlanarGeoError(f"closed form differs from series by {worst:.2e}")
    return 0


def cmd_oracle(args) -> int:
    from . import oracle as orc

    fam = orc.family_by_name(args.family)
    if args.emit == "census":
        res = orc.census_with_check(fam, args.n_vertices, check_dual=args.check,
                                    allow_large=args.allow_large)
        table: dict[int, int] = {}
        for (_, d), c in res["table"].items():
            table[d] = table.get(d, 0) + c
        text = _csv(["distance", "count"], sorted(table.items()), "census")
        if args.check and res["mismatches"]:
            _emit(text, args.output)
            raise PlanarGeoError(f"{res['mismatches']} trees disagree between contour and dual "
                                 "distance")
    else:
        trees = orc.enumerate_trees(fam, args.n_vertices, allow_large=args.allow_large)
        text = _csv(["tree", "distance"], ((t.encode(), orc.contour_distance(t)) for t in trees),
                    "trees")
    _emit(text, args.output)
    return 0


def _scaling_function(name: str):
    from .continuum import ScalingFunction

    if name == "tetravalent":
        return ScalingFunction.tetravalent()
    if name.startswith("wronskian") and name[9:].isdigit():
        return ScalingFunction.wronskian(int(name[9:]))
    if name == "ising":
        return ScalingFunction.ising()
    if name == "ising_series":
        return ScalingFunction.ising(series=True)
    raise UsageError(f"unknown scaling function {name!r}")


def cmd_continuum(args) -> int:
    import numpy as np

    from .continuum import ode_for, scaling_two_point

    fam = _scaling_function(args.function)
    if args.points < 2 or not 0 < args.r_min < args.r_max:
        raise UsageError("need 0 < r-min < r-max and at least two points")
    ode = ode_for(fam)
    rows = []
    for r in np.linspace(args.r_min, args.r_max, args.points):
        jet = scaling_two_point(fam, float(r), max(ode.max_order(), 1))
        d = list(jet.coefficients)
        rows.append((float(r), float(d[0]), -float(d[1]), abs(ode.evaluate(d))))
    _emit(_csv(["r", "F", "G", "ode_residual"], rows, "continuum"), args.output)
    return 0


def cmd_fractal(args) -> int:
    from .continuum import fractal_ratio, fractal_target, tetravalent_coefficient_table

    Ns = sorted(set(args.N))
    table = tetravalent_coefficient_table(args.n, max(Ns))
    rows = [(N, fractal_ratio(args.n, N, table), fractal_target(args.n)) for N in Ns]
    _emit(_csv(["N", "ratio", "target_3n4_over_56"], rows, "fractal"), args.output)
    return 0


def cmd_verify(args) -> int:
    from .acceptance import CHECKS, run_check

    numbers = args.criterion or list(range(1, len(CHECKS) + 1))
    results = []
    for k in numbers:
        if not 1 <= k <= len(CHECKS):
            raise UsageError(f"criteria are numbered 1..{len(CHECKS)}")
        res = run_check(k)
        results.append(res)
        line = res.line() if not args.quiet_timing else res.line().rsplit(";", 1)[0] + ")"
        print(line, flush=True)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria pass"
          + (f"; failing: {failed}" if failed else ""))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="planargeo", description="Planar graphs with geodesic distance.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def model_args(sp):
        sp.add_argument("--model", required=True)
        sp.add_argument("--bind", action="append", metavar="NAME=VALUE|NAME=VAR[*SCALE]",
                        help="bind a coupling to a number or to a scaled formal variable")
        sp.add_argument("--output")

    d = sub.add_parser("derive", help="print the recursion system of a model")
    model_args(d)
    d.set_defaults(func=cmd_derive)

    s = sub.add_parser("solve", help="series solution of the distance recursions")
    model_args(s)
    s.add_argument("--cutoff", type=int, required=True)
    s.add_argument("--n-max", type=int)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--rows", type=int, default=10**9, help="csv: largest n written")
    s.add_argument("--check", action="store_true", help="verify the residual is exactly zero")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("closedform", help="closed-form versus series table")
    model_args(c)
    c.add_argument("--at", action="append", required=True, metavar="VAR=NUMBER")
    c.add_argument("--cutoff", type=int, default=60)
    c.add_argument("--n-upto", type=int, default=20)
    c.add_argument("--sequence", choices=("R", "S"), default="R")
    c.add_argument("--tolerance", type=float)
    c.set_defaults(func=cmd_closedform)

    o = sub.add_parser("oracle", help="brute-force blossom-tree census")
    o.add_argument("--family", required=True)
    o.add_argument("--n-vertices", type=int, required=True)
    o.add_argument("--emit", choices=("census", "trees"), default="census")
    o.add_argument("--check", action="store_true", help="also compare with dual-map distance")
    o.add_argument("--allow-large", action="store_true")
    o.add_argument("--output")
    o.set_defaults(func=cmd_oracle)

    k = sub.add_parser("continuum", help="scaling function table")
    k.add_argument("--function", default="tetravalent",
                   help="tetravalent, wronskian<m>, ising or ising_series")
    k.add_argument("--r-min", type=float, default=0.3)
    k.add_argument("--r-max", type=float, default=6.0)
    k.add_argument("--points", type=int, default=20)
    k.add_argument("--output")
    k.set_defaults(func=cmd_continuum)

    f = sub.add_parser("fractal", help="coefficient ratio [g^N]R_n / [g^N]R_0")
    f.add_argument("--n", type=int, default=3)
    f.add_argument("--N", type=int, action="append", required=True)
    f.add_argument("--output")
    f.set_defaults(func=cmd_fractal)

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--criterion", type=int, action="append")
    v.add_argument("--quiet-timing", action="store_true", help="omit timings for diffable output")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "type": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2
    except PlanarGeoError as exc:
        print(json.dumps({"error": "failure", "type": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "io", "type": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
