"""Command line front end.

Exit status: 0 on success or a passing verdict, 2 when a verification
verdict is not ``pass``, 1 on usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import generators
from .graph import GraphError, InteriorMargin, WeightedGraph, ball, load_graph, dumps_graph
from .linalg import SingularSystemError
from .potential import DomainError, green_function, harnack_constant, resistance, vsr_constant
from .scales import ScaleParams, fit_exponents, k_scale, l_scale, nu_scale
from .stopping import exit_time_cdf, mean_exit_profile, mean_exit_times
from .walk import RngState, empirical_cdf, first_passage_times, heat_kernel_series
from . import verifier as vf

EXIT_OK, EXIT_INPUT, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _num_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser, graph=True):
    if graph:
        p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--x", type=int, default=0, help="base vertex")
    p.add_argument("--margin", type=float, default=None,
                   help="interior margin factor (default depends on the command)")
    p.add_argument("--force", action="store_true", help="skip interior-validity checks")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="walklab", description="Exact random-walk quantities and bound verification.")
    sub = top.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    p.add_argument("family", choices=generators.FAMILIES)
    p.add_argument("size", type=int, nargs="?", default=0)
    p.add_argument("--parts", default=None, help="for joined: e.g. path:50,star:4")
    p.add_argument("--weight", type=float, default=1.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("heat", help="heat kernel p_n(x,y) and its smoothed version")
    _common(p)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--n", type=_int_list, required=True)

    p = sub.add_parser("exit-dist", help="law of the exit time from B(x,R)")
    _common(p)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--mc", type=int, default=0, help="also run this many seeded walks")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("mean-exit", help="E(x,R) and the maximal exit time")
    _common(p)
    p.add_argument("--R", type=_int_list, required=True)

    p = sub.add_parser("resistance", help="rho(x, r, R)")
    _common(p)
    p.add_argument("--r", type=_num_list, required=True)
    p.add_argument("--R", type=_num_list, required=True)

    p = sub.add_parser("green", help="Green function column g^B(., y) for B = B(x,R)")
    _common(p)
    p.add_argument("--y", type=int, default=None, help="pole (default x)")
    p.add_argument("--R", type=float, required=True)

    p = sub.add_parser("harnack", help="best elliptic Harnack constant")
    _common(p)
    p.add_argument("--R", type=_num_list, required=True)

    p = sub.add_parser("vsr", help="P_w(tau_x < T_{x,2r}) minimised over the boundary of B(x,r)")
    _common(p)
    p.add_argument("--r", type=_num_list, required=True)

    p = sub.add_parser("scales", help="k, l and nu scale functions")
    _common(p)
    p.add_argument("--y", type=int, default=None)
    p.add_argument("--n", type=_num_list, required=True)
    p.add_argument("--R", type=_num_list, required=True)
    p.add_argument("--q", type=float, default=0.25)
    p.add_argument("--Q", type=float, default=1.0)

    p = sub.add_parser("fit-beta", help="fit the growth exponents of E(x,R)")
    _common(p)
    p.add_argument("--R", type=int, required=True, help="largest radius of the profile")

    p = sub.add_parser("verify", help="check one of the bounds and fit its constants")
    _common(p)
    p.add_argument("--theorem", choices=vf.THEOREMS, required=True)
    p.add_argument("--y", type=_int_list, default=None)
    p.add_argument("--R", type=_int_list, default=None)
    p.add_argument("--r", type=_int_list, default=None)
    p.add_argument("--n", type=_int_list, default=None)
    p.add_argument("--q", type=float, default=0.25)
    p.add_argument("--Q", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=vf.ROW_TOL, help="relative slack when re-checking rows")
    p.add_argument("--seed", type=int, default=None, help="recorded in the report (checks are exact)")
    p.add_argument("--vsr-threshold", type=float, default=vf.VSR_THRESHOLD,
                   help="smallest VSR constant accepted (vsr, ndle, tsge)")
    p.add_argument("--compare", default=None, help="second graph file for the level-stability check")
    return top


# -- output --------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def render_table(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(vf._clean([dict(zip(header, r)) for r in rows]), indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _check(g: WeightedGraph, x: int, R: float, args, default: float = 1.0):
    factor = default if args.margin is None else args.margin
    if not args.force and not InteriorMargin(factor).valid(g, x, R):
        raise UsageError(f"B({x}, {factor:g}*{R:g}) reaches the truncation boundary; use --force to override")


def _vertex(g: WeightedGraph, v: int, name: str) -> int:
    if not 0 <= v < g.n:
        raise UsageError(f"--{name} {v} is not a vertex (graph has {g.n})")
    return v


# -- commands ------------------------------------------------------------------

def cmd_generate(args) -> int:
    g = generators.generate(args.family, args.size, weight=args.weight, parts=args.parts)
    _emit(dumps_graph(g), args.out)
    return EXIT_OK


def cmd_heat(args, g) -> int:
    y = _vertex(g, args.y, "y")
    n_max = max(args.n) + 1
    series = heat_kernel_series(g, args.x, n_max, [y])[:, 0]
    rows = [[args.x, y, n, series[n], series[n] + series[n + 1]] for n in args.n]
    _emit(render_table(["x", "y", "n", "p_n", "p_tilde_n"], rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_exit_dist(args, g) -> int:
    _check(g, args.x, args.R, args)
    region = ball(g, args.x, args.R)
    cdf = exit_time_cdf(g, args.x, region, args.nmax)
    header = ["n", "P_lt_n"]
    cols = [cdf.values]
    if args.mc:
        if args.seed is None:
            raise UsageError("--mc needs --seed")
        times = first_passage_times(g, args.x, args.nmax, RngState(args.seed), exit_from=region, walkers=args.mc)
        header.append("P_lt_n_mc")
        cols.append(empirical_cdf(times, args.nmax))
    rows = [[n] + [c[n] for c in cols] for n in range(1, args.nmax + 1)]
    _emit(render_table(header, rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_mean_exit(args, g) -> int:
    rows = []
    dist = g.distances(args.x)
    for R in args.R:
        _check(g, args.x, R, args)
        mask = dist < R
        t = mean_exit_times(g, mask)
        rows.append([args.x, R, t[args.x], t[mask].max()])
    _emit(render_table(["x", "R", "E", "Ebar"], rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_resistance(args, g) -> int:
    rows = []
    for r in args.r:
        for R in args.R:
            _check(g, args.x, R, args)
            rows.append([args.x, _num(r), _num(R), resistance(g, args.x, r, R)])
    _emit(render_table(["x", "r", "R", "rho"], rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_green(args, g) -> int:
    _check(g, args.x, args.R, args)
    z = args.x if args.y is None else _vertex(g, args.y, "y")
    B = ball(g, args.x, args.R)
    col = green_function(g, B, z)
    rows = [[int(w), z, col[w]] for w in B.ids]
    _emit(render_table(["w", "pole", "green"], rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_harnack(args, g) -> int:
    rows = [[args.x, _num(R), harnack_constant(g, args.x, R, force=args.force)] for R in args.R]
    _emit(render_table(["x", "R", "constant"], rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_vsr(args, g) -> int:
    rows = [[args.x, _num(r), vsr_constant(g, args.x, r, force=args.force)] for r in args.r]
    _emit(render_table(["x", "r", "value"], rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_scales(args, g) -> int:
    params = ScaleParams(q=args.q, Q=args.Q)
    y = None if args.y is None else _vertex(g, args.y, "y")
    rows = []
    for R in args.R:
        _check(g, args.x, 2 * R, args)
        for n in args.n:
            k = k_scale(g, args.x, n, R, params)
            l = l_scale(g, args.x, y, n, R, params) if y is not None else None
            try:
                nu = nu_scale(g, args.x, n, R, params)
            except ValueError:
                nu = None
            rows.append([args.x, y, _num(n), _num(R), k, l, nu, params.q, params.Q, params.C])
    _emit(render_table(["x", "y", "n", "R", "k", "l", "nu", "q", "Q", "C"], rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_fit_beta(args, g) -> int:
    _check(g, args.x, args.R, args)
    upper, lower = fit_exponents(mean_exit_profile(g, args.x, args.R))
    rows = [[name, f.exponent, f.intercept, f.max_rel_residual, f.r_range[0], f.r_range[1], f.constant]
            for name, f in (("beta", upper), ("beta_prime", lower))]
    header = ["fit", "exponent", "intercept", "max_rel_residual", "R_min", "R_max", "constant"]
    _emit(render_table(header, rows, args.format or "csv"), args.out)
    return EXIT_OK


def run_verification(g: WeightedGraph, args, graph_file: str | None) -> vf.VerificationReport:
    t = args.theorem
    params = ScaleParams(q=args.q, Q=args.Q)
    common = {"graph_file": graph_file, "force": args.force}
    if t in ("exit-upper", "exit-lower"):
        upper, lower = vf.verify_exit_bounds(g, args.x, args.R or (4, 8, 12), params=params,
                                             margin=args.margin, tol=args.tol, **common)
        return upper if t == "exit-upper" else lower
    if t in ("p1", "p2", "lptt", "lhg"):
        reports = vf.verify_hitting_chain(g, args.x, R_values=args.R or (2, 4, 8), r_values=args.r or (1, 2),
                                          margin=args.margin, tol=args.tol, **common)
        if t not in reports:
            raise vf.EmptySweepError(f"{t}: no admissible row at this truncation")
        return reports[t]
    if t == "vsr":
        return vf.vsr_report(g, args.x, args.r or (1, 2, 4, 8), threshold=args.vsr_threshold, **common)
    if t == "tc":
        return vf.verify_time_comparison(g, [(args.x, R) for R in (args.R or (2, 4, 8))], **common)
    reports = vf.verify_heat_kernel_bounds(g, args.x, args.y, n_sweep=args.n, theorems=(t,),
                                           params=params, vsr_threshold=args.vsr_threshold, margin=args.margin, tol=args.tol, **common)
    return reports[t]


def cmd_verify(args, g) -> int:
    report = run_verification(g, args, args.graph)
    report.params.setdefault("tol", args.tol)
    if args.seed is not None:
        report.params["seed"] = args.seed
    if args.compare:
        other = run_verification(load_graph(args.compare), args, args.compare)
        key = "c" if "C" not in report.fitted else "C"
        vf.mark_unstable(report, other, key)
    if (args.format or "json") == "csv":
        header = sorted({k for r in report.rows for k in r})
        text = render_table(header, [[r.get(k) for k in header] for r in report.rows], "csv")
    else:
        text = report.to_json() + "\n"
    _emit(text, args.out)
    if args.out is not None:
        sys.stderr.write(f"{report.theorem}: {report.verdict}\n")
    return EXIT_OK if report.passed else EXIT_FAILED


def _num(v):
    return int(v) if float(v).is_integer() else v


COMMANDS = {
    "heat": cmd_heat,
    "exit-dist": cmd_exit_dist,
    "mean-exit": cmd_mean_exit,
    "resistance": cmd_resistance,
    "green": cmd_green,
    "harnack": cmd_harnack,
    "vsr": cmd_vsr,
    "scales": cmd_scales,
    "fit-beta": cmd_fit_beta,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        g = load_graph(args.graph)
        _vertex(g, args.x, "x")
        return COMMANDS[args.command](args, g)
    except (UsageError, GraphError, DomainError, SingularSystemError, ValueError, OSError) as exc:
        sys.stderr.write(f"walklab: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
