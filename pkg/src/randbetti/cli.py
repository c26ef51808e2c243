"""Command-line front end.

Every subcommand writes one artifact in ``--format`` (csv, json or svg) to
``--out`` or stdout; ``--figure PATH`` additionally renders the matching
plot next to delimited output.  All artifacts carry the tool version, the
echoed configuration and the seed.

Exit codes: 0 ok, 2 parameter error, 3 capacity error, 4 cone/span error,
5 hypothesis violation.  Errors are reported as JSON on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, plotting
from .asymptotics import SampledSource, gaussian_grid, p_of
from .core_tables import BettiTable, pure_diagram
from .curves import CurveEmbedding, curve_k_p1_upper_bound, curve_normalized, curve_profile
from .decomposition import decompose
from .errors import BettiError
from .sampling import (
    estimate_deviation_probability,
    expected_table,
    mean_table,
    sample_uniform,
    table_of,
)
from .weighted import (
    WeightFunction,
    weighted_expected_k_p1,
    weighted_gaussian_experiment,
    weighted_sample,
)

TOOL = {"name": "randbetti", "version": __version__}


class ArgumentError(BettiError):
    exit_code = 2


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


class Result:
    """What a subcommand produced: JSON payload, CSV rows and a figure factory."""

    def __init__(self, payload, header, rows, figure=None, table: BettiTable | None = None):
        self.payload = payload
        self.header = header
        self.rows = rows
        self.figure = figure
        self.table = table


def table_result(table: BettiTable, title: str, rows=None, extra: dict | None = None) -> Result:
    payload = {"table": table.to_json_dict()}
    if extra:
        payload.update(extra)
    return Result(payload, None, None, lambda: plotting.table_rows(table, rows, title), table=table)


def cmd_pure(args) -> Result:
    index = int_list(args.index)
    n = args.n if args.n is not None else len(index) + 1
    diagram = pure_diagram(args.r, n, index)
    return table_result(diagram.table, f"pure diagram r={args.r}, I={tuple(index)}",
                        extra={"degree_sequence": list(diagram.degree_sequence.degrees)})


def cmd_expect(args) -> Result:
    return table_result(expected_table(args.r, args.n), f"expected table r={args.r}, n={args.n}")


def cmd_sample(args) -> Result:
    title = f"random Betti table r={args.r}, n={args.n}, seed={args.seed}"
    if args.samples == 1:
        coeffs = sample_uniform(args.r, args.n, args.seed)
        table = table_of(coeffs)
        extra = {"coefficients": [{"I": list(i), "value": float(x)}
                                  for i, x in zip(coeffs.index_sets, coeffs.values)]}
        return table_result(table, title, rows=[args.row], extra=extra)
    table, stderr = mean_table(args.r, args.n, args.samples, args.seed)
    extra = {"samples": args.samples, "standard_error": stderr.tolist()}
    return table_result(table, f"mean of {args.samples} " + title, rows=[args.row], extra=extra)


def cmd_converge(args) -> Result:
    estimates = []
    for r in args.r_values:
        p = args.p if args.p is not None else round(args.p_frac * r)
        estimates.append(estimate_deviation_probability(
            r, args.n, p, args.q, args.epsilon, args.samples, args.seed, workers=args.threads))
    header = ["r", "p", "q", "epsilon", "samples", "hit_fraction", "standard_error", "analytic_ratio_std"]
    rows = [[e.r, e.p, e.q, e.epsilon, e.samples, e.hit_fraction, e.standard_error, e.analytic_ratio_std]
            for e in estimates]
    payload = {"estimates": [e.to_json_dict() for e in estimates]}
    return Result(payload, header, rows, lambda: plotting.deviation(
        estimates, f"deviation probability, eps={args.epsilon}, N={args.samples}"))


def _report_rows(reports):
    return [[rep.spec["a"], row["r"], row["p_r"], row["value"], row["target"], row["abs_error"]]
            for rep in reports for row in rep.per_r]


def cmd_gauss(args) -> Result:
    source = "expected" if args.source == "expected" else SampledSource(args.seed, args.samples)
    reports = gaussian_grid(args.a, args.r_values, args.n, args.q, source, args.tolerance)
    payload = {"reports": [rep.to_json_dict() for rep in reports]}
    return Result(payload, ["a", "r", "p_r", "value", "target", "abs_error"], _report_rows(reports),
                  lambda: plotting.convergence(reports, f"Stirling-normalized k_(p,{args.q}), n={args.n}"))


def cmd_curve(args) -> Result:
    emb = CurveEmbedding(args.genus, args.degree, guard=args.guard)
    prof = curve_profile(emb)
    rows = [[p, 1, str(k.numerator) if k.denominator == 1 else f"{k.numerator}/{k.denominator}"]
            for p, k in prof]
    tail = [{"p": p, "bound": str(curve_k_p1_upper_bound(emb, p))}
            for p in range(emb.r_d - emb.genus + 1, emb.r_d + 1)]
    mid = p_of(emb.r_d, 0.0, n=emb.genus)
    payload = {"genus": emb.genus, "degree": emb.degree, "r_d": emb.r_d,
               "profile": [{"p": p, "q": 1, "value": v} for p, _, v in rows],
               "tail_bounds": tail,
               "normalized_at_center": {"p": mid, "value": curve_normalized(emb, mid)}}

    def figure():
        fig, (ax,) = plotting.new_figure()
        plotting.profile(ax, [p for p, _ in prof], [float(k) for _, k in prof],
                         ylabel="$k_{p,1}$")
        ax.set_title(f"genus {emb.genus}, degree {emb.degree}")
        return fig

    return Result(payload, ["p", "q", "value"], rows, figure)


def _weight(args) -> WeightFunction:
    if args.table_csv:
        return WeightFunction.from_csv(Path(args.table_csv).read_text())
    if args.preset == "constant":
        return WeightFunction.constant(args.param if args.param is not None else "1")
    return WeightFunction.sin2(float(args.param) if args.param is not None else 0.35)


def cmd_weighted(args) -> Result:
    h = _weight(args)
    if args.r_values:
        rep = weighted_gaussian_experiment(h, args.r_values, args.a, args.seed, args.samples,
                                           q=args.row, source=args.source, tolerance=args.tolerance)
        return Result({"report": rep.to_json_dict()}, ["a", "r", "p_r", "value", "target", "abs_error"],
                      _report_rows([rep]), lambda: plotting.convergence([rep], "weighted table"))
    if args.expected:
        rows, values = [], []
        for p in range(args.r - 1):
            v = weighted_expected_k_p1(args.r, p, h, q=args.row)
            values.append(float(v))
            rows.append([p, args.row, f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else repr(v)])
        payload = {"weight": h.to_json_dict(), "expected_row": [{"p": p, "q": q, "value": v} for p, q, v in rows]}

        def figure():
            fig, (ax,) = plotting.new_figure()
            plotting.profile(ax, [row[0] for row in rows], plotting.finite(values),
                             ylabel=f"$E\\,k_{{p,{args.row}}}$")
            return fig

        return Result(payload, ["p", "q", "value"], rows, figure)
    coeffs = weighted_sample(args.r, h, args.seed)
    table = table_of(coeffs)
    payload = {"weight": h.to_json_dict(), "coefficients": [float(x) for x in coeffs.values],
               "table": table.to_json_dict()}
    return Result(payload, None, None, lambda: plotting.weighted_panels(
        list(coeffs.values), plotting.finite(table.row(1)), f"weighted random table, r={args.r}"),
        table=table)


def cmd_decompose(args) -> Result:
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    table = BettiTable.from_csv(text, r=args.r)
    dec = decompose(table)
    rows = [[i, c.numerator, c.denominator] for i, c in enumerate(dec.coefficients, start=1)]
    return Result({"decomposition": dec.to_json_dict()}, ["i", "num", "den"], rows,
                  lambda: plotting.bars([float(c) for c in dec.coefficients], "$i$", "$x_i$",
                                        f"decomposition, r={dec.r}"))


def build_parser() -> Parser:
    parser = Parser(prog="randbetti", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"randbetti {__version__}")
    common = Parser(add_help=False)
    common.add_argument("--format", choices=["csv", "json", "svg"], default="csv")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--figure", help="also render the plot to this path (.svg/.png/.pdf)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pure", parents=[common], help="emit a pure diagram")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--index", required=True, help="comma-separated index set, e.g. 2,4")
    p.set_defaults(func=cmd_pure)

    p = sub.add_parser("expect", parents=[common], help="exact expected random table")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("sample", parents=[common], help="one random table, or the mean of N")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--row", type=int, default=1, help="row plotted in figures")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("converge", parents=[common], help="deviation-probability sweep over r")
    p.add_argument("--r-values", type=int_list, default=[500, 1000, 2000])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--p", type=int, help="fixed column (default: round(p-frac * r))")
    p.add_argument("--p-frac", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("gauss", parents=[common], help="Stirling-normalized Gaussian limit")
    p.add_argument("--a", type=float_list, default=[-2.0, -1.0, 0.0, 1.0, 2.0])
    p.add_argument("--r-values", type=int_list, default=[200, 500, 1000, 2000])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--source", choices=["expected", "sampled"], default="expected")
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.set_defaults(func=cmd_gauss)

    p = sub.add_parser("curve", parents=[common], help="k_{p,1} profile of a curve embedding")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--guard", choices=["raise", "warn", "off"], default="raise")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("weighted", parents=[common], help="weighted random tables (n = 2)")
    p.add_argument("--r", type=int, default=500)
    p.add_argument("--preset", choices=["constant", "sin2"], default="sin2")
    p.add_argument("--param", help="constant value, or sin2 shift (default 0.35)")
    p.add_argument("--table-csv", help="tabulated weight: two-column CSV t,h")
    p.add_argument("--row", type=int, default=1, choices=[1, 2])
    p.add_argument("--expected", action="store_true", help="emit the exact expected row instead of a sample")
    p.add_argument("--r-values", type=int_list, help="run the Gaussian experiment over these r")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--source", choices=["expected", "sampled"], default="sampled")
    p.add_argument("--tolerance", type=float, default=0.05)
    p.set_defaults(func=cmd_weighted)

    p = sub.add_parser("decompose", parents=[common], help="decompose a two-row table CSV")
    p.add_argument("--input", required=True, help="table CSV written by this tool ('-' for stdin)")
    p.add_argument("--r", type=int, help="table width parameter (default: inferred)")
    p.set_defaults(func=cmd_decompose)
    return parser


def config_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "figure", "threads")}


def _csv_text(result: Result, comments: list[str]) -> str:
    if result.table is not None and result.header is None:
        return result.table.to_csv(comments)
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.header)
    for row in result.rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def emit(args, result: Result) -> bytes:
    config = config_echo(args)
    if args.format == "json":
        doc = {"tool": TOOL, "config": config, "seed": args.seed, "result": result.payload}
        return (json.dumps(doc, indent=2) + "\n").encode()
    if args.format == "csv":
        comments = [f"tool: {TOOL['name']} {TOOL['version']}",
                    "config: " + json.dumps(config, sort_keys=True),
                    f"seed: {args.seed}"]
        return _csv_text(result, comments).encode()
    return plotting.render(result.figure(), "svg", {"tool": TOOL, "config": config, "seed": args.seed})


def write_figure(args, result: Result) -> None:
    path = Path(args.figure)
    fmt = path.suffix.lstrip(".").lower() or "svg"
    path.write_bytes(plotting.render(result.figure(), fmt,
                                     {"tool": TOOL, "config": config_echo(args), "seed": args.seed}))


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not 0 <= args.seed < 2**64:
            raise ArgumentError(f"--seed must be a 64-bit unsigned integer, got {args.seed}")
        if args.threads < 1:
            raise ArgumentError("--threads must be >= 1")
        result = args.func(args)
        data = emit(args, result)
        if args.out:
            Path(args.out).write_bytes(data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        if args.figure:
            write_figure(args, result)
    except BettiError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        sys.stderr.write(json.dumps(err) + "\n")
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": 2}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
