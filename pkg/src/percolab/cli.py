"""Command-line front end.

Subcommands map one-to-one onto the library: gen, metrics, cheeger,
percolate, sweep, oracle, pivotal, bounds, experiment.  Every output file
embeds its config echo and seed, and identical argv + seed reproduce
identical CSV/JSON estimates (runtime_s is the one field that varies).

Exit codes: 0 success, 2 usage error, 3 precondition failure, 4 size-guard
or work-limit failure.  PERCOLAB_SEED provides a default seed; an explicit
--seed flag wins.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import bounds as bnd
from . import experiments as xp
from .errors import PreconditionError, SizeGuardError, WorkLimitError
from .graphs import (Graph, generate, girth, graph_metrics, parse_family,
                     read_graph, write_graph)
from .isoperimetry import cheeger_upper_bound, edge_cheeger_exact, vertex_iso_exact
from .oracle import exact_cluster_stats, exact_pivotal_prob
from .percolation import (component_stats, newman_ziff_sweep, sample,
                          write_canonical_csv, write_sweep_csv)
from .pivotal import (EdgeCountAtLeast, LargeComponentExists, MergeScoreAtLeast,
                      pivotal_bound, pivotal_prob_mc, write_pivotal_csv)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_GUARD = 4


def _default_seed() -> int:
    raw = os.environ.get("PERCOLAB_SEED", "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise PreconditionError(f"PERCOLAB_SEED must be an integer, got {raw!r}") from exc


def _load_graph(args) -> tuple[Graph, str]:
    has_family = getattr(args, "family", None) is not None
    has_file = getattr(args, "graph", None) is not None
    if has_family == has_file:
        raise PreconditionError("exactly one graph source: give --family or --graph")
    if has_family:
        spec = parse_family(args.family)
        return generate(spec), spec.label()
    return read_graph(args.graph), args.graph


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise PreconditionError(f"bad float list {text!r}") from exc


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise PreconditionError(f"bad integer list {text!r}") from exc


def _parse_upset(text: str):
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    if name == "large":
        return LargeComponentExists(int(rest))
    if name == "edges":
        return EdgeCountAtLeast(int(rest))
    if name == "merge":
        parts = rest.split(",")
        if len(parts) != 2:
            raise PreconditionError(f"merge up-set needs c,i; got {text!r}")
        return MergeScoreAtLeast(float(parts[0]), int(parts[1]))
    raise PreconditionError(f"unknown up-set {text!r}; use large:<s>, edges:<t>, merge:<c>,<i>")


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    spec = parse_family(args.family)
    g = generate(spec)
    write_graph(g, args.out, header_comments=[f"family={spec.label()}", f"seed={args.seed}"])
    print(f"gen: wrote {spec.label()} (n={g.n}, m={g.m}) to {args.out}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    g, label = _load_graph(args)
    met = graph_metrics(g)
    gv = girth(g)
    payload = {"source": label, "n": g.n, "m": g.m, "max_degree": met.max_degree,
               "min_degree": met.min_degree, "connected": met.connected,
               "diameter": met.diameter if math.isfinite(met.diameter) else "inf",
               "girth": gv if gv is not None else "acyclic"}
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(" ".join(f"{k}={v}" for k, v in payload.items()))
    return EXIT_OK


def _cmd_cheeger(args) -> int:
    g, label = _load_graph(args)
    if args.method == "exact":
        cut = (edge_cheeger_exact(g, work_limit=args.work_limit) if args.objective == "edge"
               else vertex_iso_exact(g, work_limit=args.work_limit))
    else:
        cut = cheeger_upper_bound(g, budget=args.budget, seed=args.seed)
    rec = cut.record(args.objective)
    rec.update({"source": label, "method": args.method, "objective": args.objective,
                "seed": args.seed})
    if args.json:
        print(json.dumps(rec, sort_keys=True))
    else:
        print(f"cheeger[{args.method},{args.objective}]: value={rec['value']:.10g} "
              f"boundary={rec['boundary']} witness={rec['witness']}")
    return EXIT_OK


def _cmd_percolate(args) -> int:
    g, label = _load_graph(args)
    s = sample(g, args.p, args.seed)
    thresholds = _parse_ints(args.thresholds) if args.thresholds else [2]
    st = component_stats(s, thresholds)
    payload = {"source": label, "p": args.p, "seed": args.seed,
               "open_edges": int(s.open.sum()), "L1": st.l1, "L2": st.l2,
               "counts": {str(k): v for k, v in st.counts.items()}}
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        counts = " ".join(f"count_ge_{k}={v}" for k, v in st.counts.items())
        print(f"percolate: p={args.p} seed={args.seed} open={payload['open_edges']} "
              f"L1={st.l1} L2={st.l2} {counts}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    g, label = _load_graph(args)
    thresholds = _parse_ints(args.thresholds) if args.thresholds else []
    grid = np.linspace(0.0, 1.0, args.grid) if args.grid else None
    if args.canonical_out and grid is None:
        raise PreconditionError("--canonical-out needs --grid")
    if args.canonical_out and not thresholds:
        raise PreconditionError("--canonical-out needs at least one --thresholds entry")
    rec = newman_ziff_sweep(g, args.trials, thresholds, args.seed, p_grid=grid,
                            threads=args.threads)
    config = {"source": label, "trials": args.trials,
              "thresholds": ",".join(str(t) for t in thresholds), "seed": args.seed}
    write_sweep_csv(rec, args.out, config)
    msg = f"sweep: {args.trials} trials on {label} -> {args.out}"
    if args.canonical_out:
        write_canonical_csv(rec, args.canonical_out, config)
        msg += f" and {args.canonical_out}"
    print(msg)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    g, label = _load_graph(args)
    thresholds = _parse_ints(args.thresholds) if args.thresholds else [2]
    st = exact_cluster_stats(g, args.p, thresholds)
    if args.json:
        payload = {"source": label, "p": st.p, "P_connected": st.p_connected,
                   "E_L1": st.e_l1, "E_L2": st.e_l2,
                   "P_L1_ge": {str(k): v for k, v in st.p_l1_ge.items()},
                   "P_two_ge": {str(k): v for k, v in st.p_two_ge.items()}}
        print(json.dumps(payload, sort_keys=True))
    else:
        parts = [f"P(connected)={st.p_connected:.10g}", f"E[L1]={st.e_l1:.10g}",
                 f"E[L2]={st.e_l2:.10g}"]
        parts += [f"P(L1>={s})={v:.10g}" for s, v in st.p_l1_ge.items()]
        parts += [f"P(two>={s})={v:.10g}" for s, v in st.p_two_ge.items()]
        print("oracle: " + " ".join(parts))
    return EXIT_OK


def _cmd_pivotal(args) -> int:
    g, label = _load_graph(args)
    upsets = [_parse_upset(t) for t in args.upsets.split(";") if t.strip()]
    if not upsets:
        raise PreconditionError("give at least one up-set via --upsets")
    ps = _parse_floats(args.p_list)
    bound = pivotal_bound(g.m, args.x)
    rows = []
    for upset in upsets:
        for p in ps:
            if args.exact:
                est, se = exact_pivotal_prob(g, p, upset), 0.0
            else:
                est, se = pivotal_prob_mc(g, p, upset, args.trials, args.seed)
            rows.append({"k": g.m, "p": p, "upset": upset.label(),
                         "estimate": est, "se": se, "bound": bound})
    config = {"source": label, "x": args.x, "trials": args.trials, "seed": args.seed,
              "exact": args.exact}
    write_pivotal_csv(rows, args.out, config)
    worst = max(rows, key=lambda r: r["estimate"])
    print(f"pivotal: {len(rows)} rows -> {args.out}; max estimate "
          f"{worst['estimate']:.6g} vs bound {bound:.6g}")
    return EXIT_OK


def _cmd_bounds(args) -> int:
    out: dict[str, float] = {}
    if args.min_omega:
        b, delta, x = bnd.BoundParams.parse(args.min_omega).require("b", "delta", "x")
        out["min_omega"] = bnd.min_uniqueness_exponent(b, delta, x)
    if args.midsize_tail:
        p = bnd.BoundParams.parse(args.midsize_tail)
        n, delta, b, A, c = p.require("n", "delta", "b", "A", "c")
        out["midsize_tail"] = bnd.midsize_tail_linear(n, delta, b, A, c)
    if args.power_tail:
        p = bnd.BoundParams.parse(args.power_tail)
        n, delta, b, A, omega = p.require("n", "delta", "b", "A", "omega")
        out["power_tail"] = bnd.midsize_tail_power(n, delta, b, A, omega)
    if args.ball_radius:
        b, c, k = bnd.BoundParams.parse(args.ball_radius).require("b", "c", "k")
        out["ball_radius"] = bnd.ball_growth_radius(b, c, k)
    if args.coverage_radius:
        n, b, omega = bnd.BoundParams.parse(args.coverage_radius).require("n", "b", "omega")
        out["coverage_radius"] = bnd.coverage_radius(n, b, omega)
    if args.uniqueness_bound:
        p = bnd.BoundParams.parse(args.uniqueness_bound)
        n, delta, b, x, omega, gamma = p.require("n", "delta", "b", "x", "omega", "gamma")
        out["uniqueness_bound"] = bnd.uniqueness_failure_bound(n, delta, b, x, omega, gamma)
    if args.sprinkling:
        p = bnd.BoundParams.parse(args.sprinkling)
        d, c, g, eps, a = p.require("d", "c", "g", "eps", "a")
        sc = bnd.sprinkling_constants(d, c, g, eps, a)
        out.update({"sprinkling_C": sc.C, "sprinkling_m": sc.m, "sprinkling_p": sc.p,
                    "sprinkling_p1": sc.p1, "sprinkling_feasible": float(sc.feasible)})
        if sc.p2 is not None:
            out["sprinkling_p2"] = sc.p2
    if args.gw_survival:
        p = bnd.BoundParams.parse(args.gw_survival)
        d, pp = p.require("d", "p")
        out["gw_survival"] = bnd.gw_survival(d, pp)
    if args.expansion_tail:
        p = bnd.BoundParams.parse(args.expansion_tail)
        n, delta, b, A = p.require("n", "delta", "b", "A")
        out["expansion_tail"] = bnd.percolated_expansion_tail(n, delta, b, A)
    if not out:
        raise PreconditionError("bounds: request at least one evaluator")
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        for key in out:
            print(f"{key}={out[key]:.10g}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    recipe = args.recipe
    seed = args.seed
    if recipe != "counterexample" and not args.families:
        raise PreconditionError(f"recipe {recipe!r} needs --families")
    if recipe == "threshold":
        specs = [parse_family(t) for t in args.families.split(";") if t.strip()]
        report = xp.threshold_scan(specs, a=args.a, trials=args.trials, seed=seed,
                                   grid_points=args.grid, threads=args.threads)
    elif recipe == "uniqueness":
        specs = [parse_family(t) for t in args.families.split(";") if t.strip()]
        report = xp.uniqueness_scan(specs, c=args.c, trials=args.trials, seed=seed,
                                    omega=args.omega, grid_points=args.grid,
                                    exact=args.exact, threads=args.threads)
    elif recipe == "counterexample":
        report = xp.counterexample_demo(args.kind, args.n, trials=args.trials, seed=seed,
                                        exact=args.exact)
    elif recipe == "sprinkle":
        spec = parse_family(args.families)
        m_mode = "girth" if args.m_mode == "girth" else int(args.m_mode)
        report = xp.sprinkling_giant_demo(spec, eps=args.eps, trials=args.trials, seed=seed,
                                          m_mode=m_mode, p_mode=args.p_mode)
    elif recipe == "expander-cheeger":
        spec = parse_family(args.families)
        report = xp.percolated_expander_cheeger(spec, _parse_floats(args.p_list),
                                                trials=args.trials, seed=seed,
                                                work_limit=args.work_limit)
    else:  # pragma: no cover - argparse choices guard this
        raise PreconditionError(f"unknown recipe {recipe!r}")
    xp.write_report_json(report, args.out)
    msg = f"experiment[{report.experiment}]: report -> {args.out}"
    if args.csv:
        xp.write_report_csv(report, args.csv)
        msg += f", points -> {args.csv}"
    print(msg + f" (runtime {report.runtime_s:.2f}s)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="percolab",
                                     description="Percolation laboratory for finite graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_graph_source(p):
        p.add_argument("--family", help="family spec, e.g. cycle:8 or rr:10000,3,seed=7")
        p.add_argument("--graph", help="path to a graph text file")

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (default: PERCOLAB_SEED or 0)")

    p = sub.add_parser("gen", help="generate a graph file")
    p.add_argument("--family", required=True)
    p.add_argument("--out", required=True)
    add_seed(p)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("metrics", help="degrees, connectivity, diameter, girth")
    add_graph_source(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_metrics)

    p = sub.add_parser("cheeger", help="isoperimetric constants and upper bounds")
    add_graph_source(p)
    p.add_argument("--objective", choices=["edge", "vertex"], default="edge")
    p.add_argument("--method", choices=["exact", "upper"], default="exact")
    p.add_argument("--work-limit", type=int, default=10 ** 8)
    p.add_argument("--budget", type=int, default=10 ** 4)
    p.add_argument("--json", action="store_true")
    add_seed(p)
    p.set_defaults(fn=_cmd_cheeger)

    p = sub.add_parser("percolate", help="sample one configuration")
    add_graph_source(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--thresholds", help="comma-separated size thresholds")
    p.add_argument("--json", action="store_true")
    add_seed(p)
    p.set_defaults(fn=_cmd_percolate)

    p = sub.add_parser("sweep", help="Newman-Ziff sweep to CSV")
    add_graph_source(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--thresholds", help="comma-separated size thresholds")
    p.add_argument("--out", required=True)
    p.add_argument("--grid", type=int, help="smoothing grid points (e.g. 101)")
    p.add_argument("--canonical-out", help="canonical CSV over the grid")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    add_seed(p)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("oracle", help="exact enumeration statistics")
    add_graph_source(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--thresholds")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("pivotal", help="pivotal probabilities vs the bound")
    add_graph_source(p)
    p.add_argument("--p-list", default="0.25,0.5,0.75")
    p.add_argument("--x", type=float, default=0.25)
    p.add_argument("--upsets", default="large:2",
                   help="semicolon-separated: large:<s>;edges:<t>;merge:<c>,<i>")
    p.add_argument("--trials", type=int, default=10 ** 4)
    p.add_argument("--exact", action="store_true", help="use the exact oracle")
    p.add_argument("--out", required=True)
    add_seed(p)
    p.set_defaults(fn=_cmd_pivotal)

    p = sub.add_parser("bounds", help="closed-form bound evaluators")
    p.add_argument("--min-omega", metavar="PARAMS")
    p.add_argument("--midsize-tail", metavar="PARAMS")
    p.add_argument("--power-tail", metavar="PARAMS")
    p.add_argument("--ball-radius", metavar="PARAMS")
    p.add_argument("--coverage-radius", metavar="PARAMS")
    p.add_argument("--uniqueness-bound", metavar="PARAMS")
    p.add_argument("--sprinkling", metavar="PARAMS")
    p.add_argument("--gw-survival", metavar="PARAMS")
    p.add_argument("--expansion-tail", metavar="PARAMS")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("experiment", help="seeded experiment recipes")
    p.add_argument("--recipe", required=True,
                   choices=["threshold", "uniqueness", "counterexample", "sprinkle",
                            "expander-cheeger"])
    p.add_argument("--families", help="semicolon-separated family specs")
    p.add_argument("--a", type=float, default=0.05)
    p.add_argument("--c", type=float, default=0.02)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--kind", choices=["cycle", "cycle_product"], default="cycle")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--m-mode", default="girth",
                   help="phase-one size floor: 'girth' or an explicit integer")
    p.add_argument("--p-mode", choices=["degree", "lattice"], default="degree")
    p.add_argument("--p-list", default="0.9,0.95,1.0")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--work-limit", type=int, default=10 ** 8)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    add_seed(p)
    p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        if getattr(args, "seed", 0) is not None and getattr(args, "seed", 0) < 0:
            raise PreconditionError("seed must be nonnegative")
        return args.fn(args)
    except (SizeGuardError, WorkLimitError) as exc:
        print(f"error (size guard): {exc}", file=sys.stderr)
        return EXIT_GUARD
    except PreconditionError as exc:
        print(f"error (precondition): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except FileNotFoundError as exc:
        print(f"error (precondition): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
