"""Command-line entry point: ``opinion-campaign <subcommand> ...``.

Exit status is 0 on success, 1 on bad input or usage, and 2 when ``--strict``
is given and some equilibrium solve did not converge.
"""
from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import campaign as cmp
from .equilibrium import SolverConfig, solve, solve_exact
from .files import (InputError, OpinionGenSpec, gen_opinions, read_opinions, write_curve,
                    write_opinions)
from .generate import gnm_random_graph
from .graph import GraphFormatError, build_augmented, load_edge_list, target_mask, write_id_map
from .icampaign import icampaign_objective, icampaign_select, verify_invariant_general, verify_invariant_special
from .oracle import brute_force_optimal, monte_carlo_opinion

EXIT_INPUT = 1
EXIT_UNCONVERGED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated node ids, got {text!r}") from None


def _add_graph_args(p, opinions=True):
    p.add_argument("--graph", required=True, type=Path, help="edge list 'src dst [weight]'")
    p.add_argument("--directed", action="store_true")
    if opinions:
        p.add_argument("--opinions", required=True, type=Path, help="CSV node,value")
    p.add_argument("--id-map", type=Path, help="write external_label,node_id mapping here")


def _add_solver_args(p):
    p.add_argument("--tol", type=float, default=1e-8, help="L-inf change per sweep (default 1e-8)")
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--method", choices=("power", "exact"), default="power")
    p.add_argument("--strict", action="store_true", help="exit 2 if any solve fails to converge")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opinion-campaign", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap (default: $OPINION_CAMPAIGN_THREADS or CPU count)")
    parser.add_argument("-o", "--output", type=Path, help="write result here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="equilibrium expressed opinions")
    _add_graph_args(p)
    _add_solver_args(p)
    p.add_argument("--fixed", type=_int_list, default=[], help="node ids clamped to 1")

    p = sub.add_parser("campaign", help="select k targets and report the objective curve")
    _add_graph_args(p)
    _add_solver_args(p)
    p.add_argument("--algorithm", choices=cmp.ALGORITHMS, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.15, help="RWR restart probability")

    p = sub.add_parser("icampaign", help="raise the k smallest internal opinions to 1")
    _add_graph_args(p)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("verify", help="check the opinion-sum invariant")
    p.add_argument("form", choices=("special", "general"))
    _add_graph_args(p)
    _add_solver_args(p)
    p.add_argument("--fixed", type=_int_list, default=[], help="targets (general form only)")

    p = sub.add_parser("gen-opinions", help="generate internal opinions")
    _add_graph_args(p, opinions=False)
    p.add_argument("--mode", choices=("uniform", "keywords"), required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--tags", type=Path, help="lines 'label term term ...'")
    p.add_argument("--keywords", help="comma separated keyword list")

    p = sub.add_parser("oracle", help="debugging oracles")
    osub = p.add_subparsers(dest="oracle", required=True, parser_class=_Parser)
    q = osub.add_parser("mc", help="Monte Carlo estimate of one expressed opinion")
    _add_graph_args(q)
    q.add_argument("--node", type=int, required=True)
    q.add_argument("--fixed", type=_int_list, default=[])
    q.add_argument("--walks", type=int, default=100_000)
    q.add_argument("--seed", type=int, default=0)
    q = osub.add_parser("brute", help="exhaustive optimum over size-k target sets")
    _add_graph_args(q)
    q.add_argument("--k", type=int, required=True)

    p = sub.add_parser("bench", help="timing on a seeded random graph")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--m", type=int, default=500_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=20)
    _add_solver_args(p)
    return parser


def _config(args) -> SolverConfig:
    return SolverConfig(tolerance=args.tol, max_iterations=args.max_iter, method=args.method,
                        parallel=args.threads is None or args.threads > 1, threads=args.threads)


def _load(args):
    graph = load_edge_list(args.graph, directed=args.directed)
    if args.id_map:
        with open(args.id_map, "w", encoding="utf-8") as fh:
            write_id_map(graph, fh)
    s = read_opinions(args.opinions, graph) if hasattr(args, "opinions") else None
    return graph, s


def _check_ids(graph, ids, what="fixed id"):
    for i in ids:
        if not 0 <= i < graph.n:
            raise InputError(f"{what} {i} is outside [0, {graph.n})")
    target_mask(graph.n, ids)


def cmd_solve(args, out):
    graph, s = _load(args)
    _check_ids(graph, args.fixed)
    cfg = _config(args)
    z, stats = solve(graph, s, args.fixed, cfg)
    write_opinions(out, graph, z, stats)
    return EXIT_UNCONVERGED if args.strict and not stats.converged else 0


def cmd_campaign(args, out):
    graph, s = _load(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", cmp.DegenerateRestartWarning)
        result = cmp.run_algorithm(args.algorithm, graph, s, args.k, _config(args), alpha=args.alpha)
    write_curve(out, result)
    return EXIT_UNCONVERGED if args.strict and result.unconverged else 0


def cmd_icampaign(args, out):
    graph, s = _load(args)
    chosen = icampaign_select(s, args.k)
    out.write("# algorithm=icampaign\n")
    out.write("step,node,internal,objective\n")
    total = float(np.sum(s))
    out.write(f"0,-1,0.0,{total!r}\n")
    for t, v in enumerate(chosen, start=1):
        total = icampaign_objective(s, chosen[:t])
        out.write(f"{t},{v},{float(s[v])!r},{total!r}\n")
    return 0


def cmd_verify(args, out):
    graph, s = _load(args)
    cfg = _config(args)
    if args.form == "special":
        if args.fixed:
            raise InputError("the special form applies only without fixed nodes")
        report = verify_invariant_special(graph, s, cfg)
        converged = not args.strict or solve(graph, s, None, cfg)[1].converged
    else:
        _check_ids(graph, args.fixed)
        z, stats = solve(graph, s, args.fixed, cfg)
        report = verify_invariant_general(build_augmented(graph, s, args.fixed), graph, z)
        converged = stats.converged
    out.write("form,lhs,rhs,gap,passed\n")
    out.write(report.csv_row() + "\n")
    return EXIT_UNCONVERGED if args.strict and not converged else 0


def cmd_gen_opinions(args, out):
    graph, _ = _load(args)
    if args.mode == "uniform":
        if args.seed is None:
            raise InputError("--mode uniform needs --seed")
        spec = OpinionGenSpec("uniform", seed=args.seed)
    else:
        if args.tags is None or not args.keywords:
            raise InputError("--mode keywords needs --tags and --keywords")
        kws = tuple(k.strip() for k in args.keywords.split(",") if k.strip())
        spec = OpinionGenSpec("keywords", tags_path=args.tags, keywords=kws)
    write_opinions(out, graph, gen_opinions(spec, graph))
    return 0


def cmd_oracle(args, out):
    graph, s = _load(args)
    if args.oracle == "mc":
        _check_ids(graph, [args.node], "node")
        _check_ids(graph, args.fixed)
        est = monte_carlo_opinion(graph, s, args.fixed, args.node, args.walks, args.seed)
        out.write("node,mean,half_width_95,walks,seed\n")
        out.write(f"{args.node},{est.mean!r},{est.half_width_95!r},{est.walks},{est.seed}\n")
    else:
        best, val = brute_force_optimal(graph, s, args.k)
        out.write("# algorithm=brute-force\n")
        out.write("step,node,gain,objective\n")
        # report the optimum as a curve over its members in id order
        prev = float(solve_exact(graph, s).sum())
        out.write(f"0,-1,0.0,{prev!r}\n")
        for t in range(1, len(best) + 1):
            g = val if t == len(best) else float(solve_exact(graph, s, best[:t]).sum())
            out.write(f"{t},{best[t - 1]},{g - prev!r},{g!r}\n")
            prev = g
    return 0


def cmd_bench(args, out):
    cfg = _config(args)
    rows = []
    t0 = time.perf_counter()
    graph = gnm_random_graph(args.n, args.m, args.seed)
    s = np.random.default_rng(args.seed).random(graph.n)
    rows.append(("generate", time.perf_counter() - t0, 0, 0, True))
    t0 = time.perf_counter()
    _, stats = solve(graph, s, None, cfg)
    rows.append(("solve", time.perf_counter() - t0, stats.iterations_used, 1, stats.converged))
    t0 = time.perf_counter()
    order = cmp.heuristic_free_degree(graph, args.k)
    rows.append(("free-degree", time.perf_counter() - t0, 0, 0, True))
    t0 = time.perf_counter()
    curve = cmp.evaluate_curve(graph, s, order, cfg, algorithm="free-degree")
    rows.append(("curve", time.perf_counter() - t0, curve.iterations, curve.solves, curve.unconverged == 0))
    out.write(f"# n={graph.n} m={graph.num_edges} seed={args.seed} k={args.k}\n")
    out.write("phase,seconds,iterations,solves,converged\n")
    for name, sec, it, nsolve, ok in rows:
        out.write(f"{name},{sec:.6f},{it},{nsolve},{str(ok).lower()}\n")
    return EXIT_UNCONVERGED if args.strict and not all(r[4] for r in rows) else 0


COMMANDS = {
    "solve": cmd_solve,
    "campaign": cmd_campaign,
    "icampaign": cmd_icampaign,
    "verify": cmd_verify,
    "gen-opinions": cmd_gen_opinions,
    "oracle": cmd_oracle,
    "bench": cmd_bench,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                return COMMANDS[args.command](args, fh)
        return COMMANDS[args.command](args, stdout)
    except (GraphFormatError, InputError, ValueError, IndexError, OSError) as exc:
        print(f"opinion-campaign: error: {exc}", file=stderr)
        return EXIT_INPUT


def run_cli(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
