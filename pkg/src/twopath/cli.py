"""Command-line laboratory tying the library together.

Verbs: gen, influence, select, dist, ic-check, experiment, plot.
Exit codes: 0 success, 1 usage, 2 data error, 3 exact-capacity exceeded.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from pathlib import Path

from .errors import GraphError, GraphFileError, InvalidParams, TooLargeForExact
from .graphs import DiGraph, classify, is_dag, read_graph, write_graph
from .influence import (
    influence_dag,
    influence_exact_general,
    influence_montecarlo,
)
from .mechanisms import (
    Mechanism,
    analytic_two_path_distribution,
    run_general_two_path,
    run_two_path,
    sample_analytic,
)
from .oracle import (
    DeviationClass,
    exact_general_two_path_distribution,
    exact_two_path_distribution,
    verify_ic,
)
from .generators import (
    BaDagParams,
    PqrParams,
    gen_ba_dag,
    gen_pqr,
    gen_random_forest,
    gen_random_monotone_dag,
    gen_random_tree,
)
from .experiments import (
    ExperimentSpec,
    read_experiment_csv,
    run_experiment,
    row_to_csv,
    CSV_HEADER,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CAPACITY = 3

EXACT_DAG_LIMIT = 500


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _mechanism(name: str) -> Mechanism:
    return Mechanism(name)


def cmd_gen(args) -> int:
    if args.model == "ba-dag":
        g = gen_ba_dag(BaDagParams(args.n, args.sinks, args.k, seed=args.seed))
        comments = [f"model=ba-dag n={args.n} sinks={args.sinks} k={args.k} seed={args.seed}"]
    elif args.model == "pqr":
        stats: dict = {}
        g = gen_pqr(
            PqrParams(args.n, args.p, args.q, args.r, seed=args.seed), stats=stats
        )
        comments = [
            f"model=pqr n={args.n} p={args.p} q={args.q} r={args.r} seed={args.seed}",
            f"edges={stats['edges']} skipped_edge_events={stats['skipped_edge_events']}",
        ]
    elif args.model == "tree":
        g = gen_random_tree(args.n, seed=args.seed)
        comments = [f"model=tree n={args.n} seed={args.seed}"]
    elif args.model == "forest":
        g = gen_random_forest(args.n, args.sinks, seed=args.seed)
        comments = [f"model=forest n={args.n} sinks={args.sinks} seed={args.seed}"]
    else:
        g = gen_random_monotone_dag(args.n, args.density, seed=args.seed)
        comments = [f"model=monotone-dag n={args.n} density={args.density} seed={args.seed}"]
    write_graph(g, args.out, comments=comments)
    print(f"wrote {g.n} vertices, {g.m} edges to {args.out}")
    return EXIT_OK


def cmd_influence(args) -> int:
    g = read_graph(args.graph)
    mode = args.mode
    if mode == "auto":
        if is_dag(g) and g.n <= EXACT_DAG_LIMIT:
            mode = "exact"
        elif not is_dag(g) and g.n <= 14:
            mode = "exact"
        else:
            mode = "mc"
    if mode == "exact":
        table = influence_dag(g) if is_dag(g) else influence_exact_general(g)
        if args.format == "csv":
            print("vertex,influence")
            for v in range(g.n):
                print(f"{v},{_frac(table[v])}")
        else:
            for v in range(g.n):
                print(f"I({v}) = {_frac(table[v])}")
    else:
        trials = args.trials if args.trials else 200 * g.n
        mc = influence_montecarlo(g, trials, args.seed)
        if args.format == "csv":
            print("vertex,influence,stderr")
            for v in range(g.n):
                print(f"{v},{mc.table[v]:.6g},{mc.stderr[v]:.6g}")
        else:
            for v in range(g.n):
                print(f"I({v}) ~ {mc.table[v]:.6g} (se {mc.stderr[v]:.6g})")
    return EXIT_OK


def cmd_select(args) -> int:
    g = read_graph(args.graph)
    rng = random.Random(args.seed)
    mech = _mechanism(args.mechanism)
    if mech is Mechanism.TWO_PATH:
        t = run_two_path(g, rng, seed=args.seed)
        print(t.to_text())
    elif mech is Mechanism.GENERAL_TWO_PATH:
        res = run_general_two_path(g, rng, seed=args.seed)
        print("ordering:", ",".join(map(str, res.ordering)))
        print(res.transcript.to_text())
    else:
        out = sample_analytic(g, rng)
        print(f"outcome: {'null' if out.is_null else out.vertex}")
    return EXIT_OK


def cmd_dist(args) -> int:
    g = read_graph(args.graph)
    mech = _mechanism(args.mechanism)
    if mech is Mechanism.TWO_PATH:
        law = exact_two_path_distribution(g)
    elif mech is Mechanism.GENERAL_TWO_PATH:
        law = exact_general_two_path_distribution(g)
    else:
        law = analytic_two_path_distribution(g)
    if args.format == "csv":
        print("vertex,probability")
        for v, p in enumerate(law.probs):
            print(f"{v},{_frac(p)}")
        print(f"null,{_frac(law.null_prob)}")
    else:
        for v, p in enumerate(law.probs):
            print(f"Pr({v}) = {_frac(p)}")
        print(f"Pr(null) = {_frac(law.null_prob)}")
    return EXIT_OK


def cmd_ic_check(args) -> int:
    g = read_graph(args.graph)
    reports = verify_ic(
        g, _mechanism(args.mechanism), DeviationClass(args.deviation_class)
    )
    print("vertex,class,baseline,best,gain")
    worst = Fraction(0)
    for r in reports:
        print(
            f"{r.vertex},{r.deviation_class.value},{_frac(r.baseline)},"
            f"{_frac(r.best)},{_frac(r.gain)}"
        )
        worst = max(worst, r.gain)
    print(f"# max gain: {_frac(worst)}", file=sys.stderr)
    return EXIT_OK


def cmd_experiment(args) -> int:
    name, _, values = args.sweep.partition("=")
    if not values:
        raise InvalidParams("sweep must look like param=v1,v2,...")
    sweep_values = tuple(float(v) for v in values.split(","))
    fixed = {}
    for item in args.param or []:
        k, _, v = item.partition("=")
        if not v:
            raise InvalidParams(f"bad --param {item!r}, expected name=value")
        fixed[k] = float(v)
    spec = ExperimentSpec(
        model=args.model,
        mechanism=_mechanism(args.mechanism),
        sweep_param=name,
        sweep_values=sweep_values,
        fixed=fixed,
        graphs_per_point=args.graphs,
        runs_per_graph=args.runs,
        seed=args.seed,
    )
    rows = run_experiment(spec, threads=args.threads, out_path=args.out)
    print(CSV_HEADER)
    for row in rows:
        print(row_to_csv(row))
    return EXIT_OK


def cmd_plot(args) -> int:
    rows, complete = read_experiment_csv(args.csv)
    if not rows:
        print("no data rows to plot", file=sys.stderr)
        return EXIT_DATA
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [float(r["param"]) for r in rows]
    ys = [float(r["mean_ratio"]) for r in rows]
    lo = [float(r["p10"]) for r in rows]
    hi = [float(r["p90"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    if len(rows) == 1:
        ax.plot(xs, ys, "o")
    else:
        ax.plot(xs, ys, "o-")
        ax.fill_between(xs, lo, hi, alpha=0.25)
    trend = "flat"
    if len(rows) > 1:
        trend = "upward" if ys[-1] > ys[0] else "downward" if ys[-1] < ys[0] else "flat"
    status = "" if complete else " [incomplete]"
    ax.set_title(f"mean ratio vs {args.xlabel or 'param'} (trend: {trend}){status}")
    ax.set_xlabel(args.xlabel or "param")
    ax.set_ylabel("ratio of maximal to selected influence")
    out = args.out or str(Path(args.csv).with_suffix(".png"))
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="twopath", description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="master random seed")
    parser.add_argument("--threads", type=int, default=1, help="worker processes")
    parser.add_argument(
        "--format", choices=["text", "csv"], default="text", help="output style"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random network file")
    p.add_argument(
        "--model",
        required=True,
        choices=["ba-dag", "pqr", "tree", "forest", "monotone-dag"],
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sinks", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--p", type=float, default=0.08)
    p.add_argument("--q", type=float, default=0.02)
    p.add_argument("--r", type=float, default=0.9)
    p.add_argument("--density", type=float, default=0.25)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("influence", help="per-vertex influence of a graph file")
    p.add_argument("graph")
    p.add_argument("--mode", choices=["auto", "exact", "mc"], default="auto")
    p.add_argument("--trials", type=int, default=0)
    p.set_defaults(func=cmd_influence)

    p = sub.add_parser("select", help="run a mechanism once, printing the transcript")
    p.add_argument("graph")
    p.add_argument(
        "--mechanism",
        default="two-path",
        choices=[m.value for m in Mechanism],
    )
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("dist", help="exact selection distribution")
    p.add_argument("graph")
    p.add_argument(
        "--mechanism",
        default="two-path",
        choices=[m.value for m in Mechanism],
    )
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("ic-check", help="brute-force deviation sweep")
    p.add_argument("graph")
    p.add_argument(
        "--mechanism",
        default="two-path",
        choices=[m.value for m in Mechanism],
    )
    p.add_argument(
        "--deviation-class",
        default="any",
        choices=[c.value for c in DeviationClass],
    )
    p.set_defaults(func=cmd_ic_check)

    p = sub.add_parser("experiment", help="parameter sweep emitting CSV")
    p.add_argument("--model", required=True, choices=["ba-dag", "pqr"])
    p.add_argument(
        "--mechanism",
        required=True,
        choices=[m.value for m in Mechanism],
    )
    p.add_argument("--sweep", required=True, help="param=v1,v2,...")
    p.add_argument(
        "--param",
        action="append",
        help="fixed parameter name=value (repeatable)",
    )
    p.add_argument("--graphs", type=int, default=100)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot", help="render an experiment CSV")
    p.add_argument("csv")
    p.add_argument("--out", default=None)
    p.add_argument("--xlabel", default=None)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TooLargeForExact as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(
            "hint: the instance is too large for exact computation; "
            "use the Monte Carlo modes (influence --mode mc, select)",
            file=sys.stderr,
        )
        return EXIT_CAPACITY
    except (GraphFileError, GraphError, InvalidParams, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
