"""Command-line front end.

Subcommands map onto the library modules:

    bw        generate/load the exact series coefficients (cached to disk)
    alpha     strong-coupling coefficient table
    table2    energy table with bound rows and containment flags
    energy    single strong-coupling energy evaluation
    converge  per-order approach data (plot-ready)
    fit       exponential-law fit of the convergence envelope
    oracle    Rayleigh-Ritz reference energies
    wn        truncated variational energy, optionally at the optimal Omega

Output is deterministic for a fixed command line: text tables group
fractional digits in triples for visual diffing (disable with --plain);
csv and json carry the same plain decimal strings.  Exit codes: 0 success,
2 usage error, 3 domain error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from mpmath import mp

from . import benderwu, diagnostics, evaluate, oracle, strongcoupling, vptcore
from .numerics import DEFAULT_CONTEXT, PrecisionContext, rational_from_decimal

__all__ = ["main", "build_parser"]

CACHE_DIR_ENV = "ANHARMONIC_CACHE_DIR"
DEFAULT_CACHE_DIR = "cache"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4


def render_fixed(x, digits: int) -> str:
    """Plain fixed-point decimal with the given significant digits."""
    return mp.nstr(x, digits, strip_zeros=False, min_fixed=mp.ninf, max_fixed=mp.inf)


def group_triples(s: str) -> str:
    """Published-table style digit grouping: 0.667 986 259 ..."""
    if "." not in s or "inf" in s or "nan" in s:
        return s
    head, frac = s.split(".", 1)
    groups = [frac[i:i + 3] for i in range(0, len(frac), 3)]
    return head + "." + " ".join(groups)


class Table:
    """Uniform command output: headers plus pre-rendered string rows."""

    def __init__(self, headers, rows, grouped_columns=(), bare_text=False):
        self.headers = list(headers)
        self.rows = [list(r) for r in rows]
        self.grouped_columns = set(grouped_columns)
        self.bare_text = bare_text  # no header line in text mode

    def to_text(self, grouped: bool) -> str:
        rows = self.rows
        if grouped:
            rows = [
                [group_triples(v) if i in self.grouped_columns else v
                 for i, v in enumerate(row)]
                for row in rows
            ]
        table = rows if self.bare_text else [self.headers] + rows
        widths = [max(len(r[i]) for r in table) for i in range(len(self.headers))]
        lines = []
        for r in table:
            cells = [r[i].ljust(widths[i]) for i in range(len(r))]
            lines.append("  ".join(cells).rstrip())
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.headers)
        writer.writerows(self.rows)
        return buf.getvalue()

    def to_json(self) -> str:
        objs = [dict(zip(self.headers, row)) for row in self.rows]
        return json.dumps(objs, indent=2) + "\n"


def write_output(args, table: Table) -> None:
    if args.format == "text":
        payload = table.to_text(grouped=not args.plain)
    elif args.format == "csv":
        payload = table.to_csv()
    else:
        payload = table.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def make_context(args) -> PrecisionContext:
    work = args.workdigits if args.workdigits else DEFAULT_CONTEXT.working_digits
    digits = args.digits if args.digits else DEFAULT_CONTEXT.output_digits
    return PrecisionContext(work, digits)


def cache_dir(args) -> str:
    if args.cache_dir:
        return args.cache_dir
    return os.environ.get(CACHE_DIR_ENV, DEFAULT_CACHE_DIR)


def load_series(args, order: int):
    path_dir = cache_dir(args)
    os.makedirs(path_dir, exist_ok=True)
    path = os.path.join(path_dir, f"bw-{order}.txt")
    series, _ = benderwu.load_or_generate(path, order)
    return series


def cmd_bw(args) -> int:
    series = load_series(args, args.order)
    rows = [[str(l), f"{c.numerator}/{c.denominator}"]
            for l, c in enumerate(series.coefficients)]
    write_output(args, Table(["order", "coefficient"], rows, bare_text=True))
    return EXIT_OK


def cmd_alpha(args) -> int:
    ctx = make_context(args)
    series = load_series(args, args.order)
    records = strongcoupling.alpha_table(series, args.order, args.nmax, ctx=ctx)
    rows = [[str(rec.n), render_fixed(rec.value, ctx.output_digits)] for rec in records]
    write_output(args, Table(["n", "alpha_n"], rows, grouped_columns={1}))
    return EXIT_OK


def _bounds_flag(report) -> str:
    if report is None:
        return ""
    if report.inside:
        return "inside"
    side = "above upper" if report.signed_margin > 0 else "below lower"
    return f"outside ({mp.nstr(report.signed_margin, 5)} {side} bound)"


def cmd_table2(args) -> int:
    ctx = make_context(args)
    series = load_series(args, args.order)
    records = strongcoupling.alpha_table(series, args.order, max(args.nmax), ctx=ctx)
    g4_values = args.g4 if args.g4 else None
    rows_data = evaluate.table2(records, g4_values=g4_values,
                                nmax_values=tuple(args.nmax), ctx=ctx)
    rows = []
    for row in rows_data:
        if row.label in ("lb", "ub"):
            rec = evaluate.VINETTE_CIZEK_BOUNDS[row.g_over_4]
            value = rec.lower if row.label == "lb" else rec.upper
        else:
            value = render_fixed(row.value, ctx.output_digits)
        rows.append([
            str(float(row.g_over_4)),
            row.label,
            value,
            _bounds_flag(row.report),
        ])
    write_output(args, Table(["g/4", "n_max", "E0", "bounds"], rows, grouped_columns={2}))
    return EXIT_OK


def cmd_energy(args) -> int:
    ctx = make_context(args)
    series = load_series(args, args.order)
    records = strongcoupling.alpha_table(series, args.order, args.nmax, ctx=ctx)
    g4 = rational_from_decimal(args.g4)
    omega = rational_from_decimal(args.omega)
    est = evaluate.strong_energy(records, g4, omega, args.nmax, ctx)
    flag = ""
    if omega == 1 and g4 in evaluate.VINETTE_CIZEK_BOUNDS:
        report = evaluate.check_bounds(est, evaluate.VINETTE_CIZEK_BOUNDS[g4], ctx)
        flag = _bounds_flag(report)
    rows = [[args.g4, args.omega, str(args.nmax),
             render_fixed(est.value, ctx.output_digits), flag]]
    write_output(args, Table(["g/4", "omega", "n_max", "E0", "bounds"], rows,
                             grouped_columns={3}))
    return EXIT_OK


def cmd_converge(args) -> int:
    ctx = make_context(args)
    series = load_series(args, args.order)
    data = diagnostics.export_fig_data(series, args.n, args.n_from, args.n_to,
                                       reference_order=args.order, ctx=ctx)
    rows = [[str(N), render_fixed(x, ctx.output_digits),
             render_fixed(delta, ctx.output_digits),
             render_fixed(ln_delta, ctx.output_digits), str(sign)]
            for N, x, delta, ln_delta, sign in data]
    write_output(args, Table(list(diagnostics.FIG_DATA_COLUMNS), rows))
    return EXIT_OK


def cmd_fit(args) -> int:
    ctx = make_context(args)
    series = load_series(args, args.order)
    fit, _, pts = diagnostics.kappa_estimate(series, args.n, N_from=args.nmin,
                                             N_to=args.order, N_min=args.nmin,
                                             reference_order=args.order, ctx=ctx)
    rows = [[str(args.n),
             render_fixed(fit.kappa1, 8),
             render_fixed(fit.kappa0, 8),
             render_fixed(fit.rms_residual, 6),
             str(fit.points_used)]]
    write_output(args, Table(["n", "kappa1", "kappa0", "rms_residual", "points"], rows))
    return EXIT_OK


def cmd_oracle(args) -> int:
    digits = args.digits if args.digits else 25
    work = args.workdigits if args.workdigits else max(60, digits + 25)
    config = oracle.RitzConfig(basis_size=args.basis,
                               basis_frequency=rational_from_decimal(args.basis_frequency)
                               if args.basis_frequency else None,
                               working_digits=work)
    g4 = rational_from_decimal(args.g4)
    omega = rational_from_decimal(args.omega)
    if args.scan:
        sizes = [int(s) for s in args.scan.split(",")]
        results = oracle.ritz_convergence_scan(4 * g4, omega, sizes, config)
        rows = [[str(size), render_fixed(value, digits)] for size, value in results]
        write_output(args, Table(["basis_size", "E0"], rows, grouped_columns={1}))
    else:
        value = oracle.ritz_ground_energy(4 * g4, omega, config)
        rows = [[args.g4, args.omega, str(args.basis), render_fixed(value, digits)]]
        write_output(args, Table(["g/4", "omega", "basis_size", "E0"], rows,
                                 grouped_columns={3}))
    return EXIT_OK


def cmd_wn(args) -> int:
    ctx = make_context(args)
    series = load_series(args, args.N)
    g = rational_from_decimal(args.g)
    omega = rational_from_decimal(args.omega)
    if args.optimize:
        trial = vptcore.optimal_frequency(series, g, omega, args.N, ctx)
    elif args.trial is not None:
        trial = rational_from_decimal(args.trial)
    else:
        raise ValueError("either --optimize or --trial is required")
    energy = vptcore.variational_energy(series, g, omega, trial, args.N, ctx)
    rows = [[str(args.N), render_fixed(energy.trial_omega, ctx.output_digits),
             render_fixed(energy.value, ctx.output_digits)]]
    write_output(args, Table(["N", "trial_omega", "W_N"], rows, grouped_columns={1, 2}))
    return EXIT_OK


def _add_common(p):
    p.add_argument("--format", choices=("text", "csv", "json"), default="text",
                   help="output format (default text)")
    p.add_argument("--plain", action="store_true",
                   help="disable digit grouping in text output")
    p.add_argument("--digits", type=int, default=None,
                   help="output precision in significant digits (default 25)")
    p.add_argument("--workdigits", type=int, default=None,
                   help="working precision in decimal digits (default 300)")
    p.add_argument("--cache-dir", default=None,
                   help=f"series cache directory (default ${CACHE_DIR_ENV} or "
                        f"./{DEFAULT_CACHE_DIR})")
    p.add_argument("--out", default=None, help="write output to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anharmonic",
        description="Strong-coupling expansion of the quartic anharmonic "
                    "oscillator by variational resummation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bw", help="generate or load the exact series coefficients")
    p.add_argument("--order", type=int, default=251)
    _add_common(p)
    p.set_defaults(func=cmd_bw)

    p = sub.add_parser("alpha", help="strong-coupling coefficient table")
    p.add_argument("--order", type=int, default=251)
    p.add_argument("--nmax", type=int, default=22)
    _add_common(p)
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("table2", help="energy table with bound checks")
    p.add_argument("--order", type=int, default=251)
    p.add_argument("--g4", action="append", default=None,
                   help="coupling g/4 (repeatable; default: all tabulated)")
    p.add_argument("--nmax", type=int, nargs="+", default=[15, 20, 22])
    _add_common(p)
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("energy", help="strong-coupling energy at one coupling")
    p.add_argument("--order", type=int, default=251)
    p.add_argument("--g4", required=True)
    p.add_argument("--omega", default="1")
    p.add_argument("--nmax", type=int, default=22)
    _add_common(p)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("converge", help="per-order convergence data")
    p.add_argument("--order", type=int, default=251)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--from", dest="n_from", type=int, default=65)
    p.add_argument("--to", dest="n_to", type=int, default=251)
    _add_common(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("fit", help="exponential-law envelope fit")
    p.add_argument("--order", type=int, default=251)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--nmin", type=int, default=65)
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("oracle", help="Rayleigh-Ritz reference energy")
    p.add_argument("--g4", default="1.0")
    p.add_argument("--omega", default="1")
    p.add_argument("--basis", type=int, default=80)
    p.add_argument("--basis-frequency", default=None)
    p.add_argument("--scan", default=None,
                   help="comma-separated ascending basis sizes")
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("wn", help="truncated variational energy W_N")
    p.add_argument("--g", required=True)
    p.add_argument("--omega", default="1")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--trial", default=None, help="trial frequency Omega")
    p.add_argument("--optimize", action="store_true",
                   help="use the least-sensitivity Omega_N")
    _add_common(p)
    p.set_defaults(func=cmd_wn)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
