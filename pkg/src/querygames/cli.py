"""Command-line front end.

One binary with subcommands; all randomness flows from a single --seed
through named sub-streams, CSV outputs are byte-stable (rows sorted before
writing, versioned schema header), and exit codes separate usage errors (2),
resource errors (3), and verification failures (4).
"""

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .engine import CandidateSet, Query, QueryKind, Side, apply_reply, partition, play
from .errors import (
    BudgetExceededError,
    GraphError,
    InstanceError,
    QueryError,
    ResourceLimitError,
    StrategyError,
)
from .expansion import (
    effective_i,
    lower_bound_certificate,
    niceness_check,
    pair_partition,
    report_csv_header,
    report_csv_row,
    sphere_growth,
)
from .graphs import (
    GnpParams,
    diameter,
    graph_from_text,
    graph_to_text,
    is_connected,
    make_complete,
    make_path,
    make_separation_graph,
    make_star,
    sample_gnp,
)
from .hardness import build_reduction, parse_instance, verify_lemma
from .seeds import subseed
from .solver import SolverLimits, extract_strategy, game_value
from .strategies import (
    ADVERSARY_NAMES,
    ALGORITHM_NAMES,
    FinishGreedy,
    make_adversary,
    make_algorithm,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_VERIFY = 4

SIMULATE_SCHEMA = "simulate-v1"
SWEEP_SCHEMA = "sweep-v1"


def _kind(text):
    return QueryKind.EDGE if text == "edge" else QueryKind.PAIR


def _load_graph(path):
    with open(path, encoding="utf-8") as f:
        return graph_from_text(f.read())


def _parse_gnp(text):
    try:
        n_s, p_s = text.split(",")
        return int(n_s), float(p_s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--gnp wants 'n,p', got {text!r}") from exc


def _resolve_graph(args, seed, require_diameter=None):
    """Graph from --graph or --gnp; gnp samples are resampled (connected,
    optional diameter requirement) on a named sub-stream."""
    if getattr(args, "graph", None):
        g = _load_graph(args.graph)
        return g, {"source": args.graph, "d": 2 * g.m / g.n}
    if getattr(args, "gnp", None):
        n, p = args.gnp
        for attempt in range(500):
            g = sample_gnp(GnpParams(n=n, p=p, seed=subseed(seed, "gnp", attempt)))
            if not is_connected(g):
                continue
            if require_diameter is not None and diameter(g) != require_diameter:
                continue
            return g, {"source": f"gnp({n},{p})", "d": p * n}
        raise ResourceLimitError("could not sample a graph meeting the requirements")
    raise QueryError("one of --graph or --gnp is required")


def _out_stream(path):
    if path:
        return open(path, "w", encoding="utf-8")
    import contextlib

    return contextlib.nullcontext(sys.stdout)  # keep stdout open after `with`


# ---------------------------------------------------------------------------
# subcommands


def cmd_make(args):
    fam = args.family
    if fam == "path":
        g = make_path(args.n)
    elif fam == "star":
        g = make_star(args.n)
    elif fam == "complete":
        g = make_complete(args.n)
    elif fam == "gk":
        g = make_separation_graph(args.k)
    elif fam == "gnp":
        g = sample_gnp(GnpParams(n=args.n, p=args.p, seed=args.seed))
    else:
        raise QueryError(f"unknown family {fam}")
    with _out_stream(args.out) as f:
        f.write(graph_to_text(g))
    return EXIT_OK


def cmd_compute(args):
    g = _load_graph(args.graph)
    kind = _kind(args.kind)
    limits = SolverLimits(max_vertices=args.max_vertices)
    v0 = [int(x) for x in args.v0.split(",")] if args.v0 else None
    if args.tree:
        tree = extract_strategy(g, kind, limits=limits, v0=v0)
        print(f"value {tree.depth()}")
        print(tree.render(), end="")
    else:
        result = game_value(g, kind, limits=limits, v0=v0)
        print(result.value)
    return EXIT_OK


def _play_one_trial(payload):
    """Worker for one seeded trial; graph passed as serialized text once per
    process (see _worker_init)."""
    (trial, seed_t, kind_s, strategy, adversary, options, budget, finish_greedy) = payload
    g = _WORKER_GRAPH["g"]
    kind = _kind(kind_s)
    alg = make_algorithm(strategy, g, kind, seed_t, options)
    if finish_greedy:
        alg = FinishGreedy(alg, g)
    adv = make_adversary(adversary, g, kind, seed_t, options)
    cap = budget if budget is not None else (alg.default_budget or g.n - 1)
    tr = play(g, kind, alg, adv, budget=cap, seed_note=str(seed_t))
    return (trial, seed_t, cap, tr.num_rounds, tr.terminal, len(tr.final))


_WORKER_GRAPH = {}


def _worker_init(graph_text):
    _WORKER_GRAPH["g"] = graph_from_text(graph_text)


def _run_trials_parallel(graph_text, payloads, jobs):
    if jobs <= 1:
        _worker_init(graph_text)
        return [_play_one_trial(p) for p in payloads]
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=_worker_init, initargs=(graph_text,)
    ) as pool:
        return list(pool.map(_play_one_trial, payloads))


def cmd_simulate(args):
    kind = _kind(args.kind)
    g, info = _resolve_graph(args, args.seed, require_diameter=args.require_diameter)
    options = {
        "b": args.b,
        "d": args.d if args.d is not None else info["d"],
        "i": args.i,
        "p": args.p,
        "target": args.target,
    }
    # validate names before spawning workers
    make_algorithm(args.strategy, g, kind, 0, options)
    make_adversary(args.adversary, g, kind, 0, options)
    payloads = [
        (
            t,
            subseed(args.seed, "trial", t),
            args.kind,
            args.strategy,
            args.adversary,
            options,
            args.budget,
            args.finish_greedy,
        )
        for t in range(args.trials)
    ]
    rows = _run_trials_parallel(graph_to_text(g), payloads, args.jobs)
    rows.sort()
    with _out_stream(args.out) as f:
        f.write(f"# schema: {SIMULATE_SCHEMA}\n")
        f.write("trial,seed,n,kind,strategy,adversary,budget,rounds,success,final_size\n")
        for trial, seed_t, cap, rounds, success, final in rows:
            f.write(
                f"{trial},{seed_t},{g.n},{args.kind},{args.strategy},"
                f"{args.adversary},{cap},{rounds},{int(success)},{final}\n"
            )
    return EXIT_OK


@dataclass(frozen=True)
class SweepConfig:
    """Grid of the scaling experiment: degree exponents, sizes, trials."""

    xis: tuple
    ns: tuple
    trials: int
    kind: str = "pair"
    strategy: str = "phase-pair"
    adversary: str = "adv-halving"
    b: float = 4.0
    seed: int = 0
    jobs: int = 1
    out: str = None

    def __post_init__(self):
        if not self.xis or not self.ns:
            raise QueryError("sweep needs non-empty --xi and --n lists")
        if any(not 0 < xi < 1 for xi in self.xis):
            raise QueryError("xi values must lie strictly between 0 and 1")
        if self.trials < 1:
            raise QueryError("sweep needs at least one trial per cell")


def run_sweep(cfg):
    """One CSV row per (xi, n, trial): (xi, n, d, i, budget, rounds, success)."""
    out_rows = []
    for xi in cfg.xis:
        for n in cfg.ns:
            d = n**xi
            p = d / n
            i = effective_i(n, d)
            cell_seed = subseed(cfg.seed, "cell", xi, n)
            g = None
            for attempt in range(200):
                cand = sample_gnp(GnpParams(n=n, p=p, seed=subseed(cell_seed, "g", attempt)))
                if is_connected(cand):
                    g = cand
                    break
            if g is None:
                raise ResourceLimitError(f"no connected sample at xi={xi}, n={n}")
            options = {"b": cfg.b, "d": d, "i": i}
            payloads = [
                (
                    t,
                    subseed(cell_seed, "trial", t),
                    cfg.kind,
                    cfg.strategy,
                    cfg.adversary,
                    options,
                    None,
                    False,
                )
                for t in range(cfg.trials)
            ]
            rows = _run_trials_parallel(graph_to_text(g), payloads, cfg.jobs)
            rows.sort()
            for trial, seed_t, cap, rounds, success, _final in rows:
                out_rows.append((xi, n, d, i, trial, seed_t, cap, rounds, int(success)))
    out_rows.sort()
    with _out_stream(cfg.out) as f:
        f.write(f"# schema: {SWEEP_SCHEMA}\n")
        f.write("xi,n,d,i,trial,seed,budget,rounds,success\n")
        for xi, n, d, i, trial, seed_t, cap, rounds, success in out_rows:
            f.write(
                f"{xi:.10g},{n},{d:.10g},{i},{trial},{seed_t},{cap},{rounds},{success}\n"
            )
    return out_rows


def cmd_sweep(args):
    cfg = SweepConfig(
        xis=tuple(float(x) for x in args.xi.split(",") if x),
        ns=tuple(int(x) for x in args.n.split(",") if x),
        trials=args.trials,
        kind=args.kind,
        strategy=args.strategy,
        adversary=args.adversary,
        b=args.b,
        seed=args.seed,
        jobs=args.jobs,
        out=args.out,
    )
    run_sweep(cfg)
    return EXIT_OK


def cmd_reduce(args):
    with open(args.instance, encoding="utf-8") as f:
        inst = parse_instance(f.read())
    rg = build_reduction(inst)
    with _out_stream(args.out) as f:
        f.write(graph_to_text(rg.graph))
    n, k, m = inst.n, inst.k, inst.m
    print(
        f"reduction graph: {rg.graph.n} vertices "
        f"(2 + 5n + 5m + 5n(5(m-k)-3) with n={n}, k={k}, m={m})",
        file=sys.stderr,
    )
    print(f"measured diameter: {diameter(rg.graph)}", file=sys.stderr)
    return EXIT_OK


def cmd_verify_lemma(args):
    with open(args.instance, encoding="utf-8") as f:
        inst = parse_instance(f.read())
    report = verify_lemma(inst, seed=args.seed, random_algorithms=args.random_algs)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_expansion(args):
    g, info = _resolve_graph(args, args.seed)
    d = args.d if args.d is not None else info["d"]
    i = args.i if args.i is not None else effective_i(g.n, d)
    checks = args.checks.split(",")
    ref = d**i
    with _out_stream(args.out) as f:
        f.write(report_csv_header())
        if "sphere" in checks:
            import random

            hits = 0
            for t in range(args.trials):
                v = random.Random(subseed(args.seed, "sphere", t)).randrange(g.n)
                rep = sphere_growth(g, {v}, i, d)
                hits += abs(rep.ball_ratio - 1.0) <= args.tolerance
            f.write(
                report_csv_row(
                    "sphere-growth",
                    f"i={i};tol={args.tolerance};trials={args.trials}",
                    hits,
                    args.trials,
                    hits / args.trials,
                    hits >= args.min_pass * args.trials,
                )
            )
        if "pair" in checks:
            import random

            ok = 0
            for t in range(args.trials):
                rng = random.Random(subseed(args.seed, "pair", t))
                x = rng.randrange(g.n)
                y = rng.randrange(g.n - 1)
                y += 1 if y >= x else 0
                rep = pair_partition(g, x, y, i, d=d)
                if (
                    abs(rep.x_ratio - 1.0) <= args.tolerance
                    and abs(rep.y_ratio - 1.0) <= args.tolerance
                    and rep.r_ratio <= args.tolerance
                ):
                    ok += 1
            f.write(
                report_csv_row(
                    "pair-partition",
                    f"i={i};tol={args.tolerance};trials={args.trials}",
                    ok,
                    args.trials,
                    ok / args.trials,
                    ok >= args.min_pass * args.trials,
                )
            )
        if "nice" in checks:
            rep = niceness_check(
                g,
                i,
                d,
                pairs=args.trials,
                tolerance=args.tolerance,
                min_fraction=args.min_pass,
                seed=args.seed,
            )
            f.write(
                report_csv_row(
                    "niceness",
                    f"i={i};tol={args.tolerance};pairs={rep.pairs_checked}",
                    rep.pairs_ok,
                    rep.pairs_checked,
                    rep.fraction_ok,
                    rep.nice,
                )
            )
        if "lower" in checks:
            k = args.k
            if k is None:
                k = int((g.n / (4 * d**i)) * math.log(d**i))
            cert = lower_bound_certificate(g, i, k=k, trials=args.trials, seed=args.seed)
            f.write(
                report_csv_row(
                    "lower-bound",
                    f"i={i};k={cert.k};trials={cert.trials}",
                    cert.far_pair_hits,
                    cert.trials,
                    cert.far_pair_hits / cert.trials,
                    cert.far_pair_hits >= args.min_pass * cert.trials,
                )
            )
    return EXIT_OK


def _prompt(stream_in, text):
    print(text, end="", flush=True)
    line = stream_in.readline()
    if not line:
        raise EOFError
    return line.strip()


def cmd_play(args):
    g = _load_graph(args.graph)
    kind = _kind(args.kind)
    cands = CandidateSet.full(g.n)
    stdin = sys.stdin
    rounds = 0
    if args.side == "algorithm":
        opponent = make_adversary(args.opponent, g, kind, args.seed, {})
        adv_state = opponent.start(cands)
    else:
        opponent = make_algorithm(args.opponent, g, kind, args.seed, {})
        alg_state = opponent.start(cands)
    budget = args.budget if args.budget is not None else 4 * g.n
    try:
        while len(cands) > 1 and rounds < budget:
            shown = ", ".join(str(v) for v in sorted(cands.members)[:30])
            extra = "" if len(cands) <= 30 else ", ..."
            print(f"round {rounds + 1} | candidates ({len(cands)}): {shown}{extra}")
            if args.side == "algorithm":
                try:
                    raw = _prompt(stdin, "query (u v)> ")
                    u, v = (int(x) for x in raw.split())
                    q = Query(u, v, kind)
                    part = partition(g, cands, q)
                except (ValueError, QueryError) as exc:
                    print(f"invalid query: {exc}")
                    continue  # no round charged
                side = opponent.choose(adv_state, cands, q, part)
                new_cands = apply_reply(cands, part, side)
                adv_state = opponent.advance(adv_state, cands, q, side, new_cands)
                print(f"reply: {q.endpoint(side)}")
            else:
                q = opponent.next_query(alg_state, cands)
                part = partition(g, cands, q)
                print(f"engine queries ({q.u}, {q.v})")
                try:
                    raw = _prompt(stdin, f"reply ({q.u} or {q.v})> ")
                    choice = int(raw)
                    if choice == q.u:
                        side = Side.U
                    elif choice == q.v:
                        side = Side.V
                    else:
                        print("reply must name one endpoint of the query")
                        continue
                    new_cands = apply_reply(cands, part, side)
                except (ValueError, QueryError) as exc:
                    print(f"invalid reply: {exc}")
                    continue
                alg_state = opponent.advance(alg_state, cands, q, side, new_cands)
            rounds += 1
            cands = new_cands
    except EOFError:
        print("\nsession ended early")
        return EXIT_USAGE
    if len(cands) == 1:
        print(f"target located: vertex {next(iter(cands.members))} after {rounds} rounds")
    else:
        print(f"budget spent after {rounds} rounds; {len(cands)} candidates remain")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def _add_graph_source(p, gnp=True):
    p.add_argument("--graph", help="edge-list file")
    if gnp:
        p.add_argument("--gnp", type=_parse_gnp, help="sample G(n,p): 'n,p'")


def build_parser():
    top = argparse.ArgumentParser(
        prog="querygames",
        description="pair- and edge-query vertex-search games on graphs",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make", help="write a named graph to a file")
    p.add_argument("--family", required=True, choices=["path", "star", "complete", "gk", "gnp"])
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=3, help="height for the gk family")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("compute", help="exact game value of a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--kind", choices=["pair", "edge"], required=True)
    p.add_argument("--max-vertices", type=int, default=18)
    p.add_argument("--v0", help="comma-separated initial candidate vertices")
    p.add_argument("--tree", action="store_true", help="print the optimal strategy tree")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("simulate", help="seeded strategy-vs-adversary trials, CSV out")
    _add_graph_source(p)
    p.add_argument("--kind", choices=["pair", "edge"], required=True)
    p.add_argument("--strategy", required=True, help=f"one of {ALGORITHM_NAMES}")
    p.add_argument("--adversary", default="adv-halving", help=f"one of {ADVERSARY_NAMES}")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--b", type=float, default=4.0)
    p.add_argument("--d", type=float, help="expected-degree parameter for phase budgets")
    p.add_argument("--i", type=int, help="override the effective exponent")
    p.add_argument("--p", type=float, help="density for dense-edge budgets")
    p.add_argument("--target", type=int, help="planted target for adv-target")
    p.add_argument("--require-diameter", type=int, help="resample gnp until this diameter")
    p.add_argument("--finish-greedy", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="scaling experiment over xi and n, CSV out")
    p.add_argument("--xi", required=True, help="comma-separated xi values in (0,1)")
    p.add_argument("--n", required=True, help="comma-separated vertex counts")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--kind", choices=["pair", "edge"], default="pair")
    p.add_argument("--strategy", default="phase-pair")
    p.add_argument("--adversary", default="adv-halving")
    p.add_argument("--b", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reduce", help="build the set-cover reduction graph")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify-lemma", help="verify the reduction equivalence")
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-algs", type=int, default=200)
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("expansion", help="empirical neighbourhood checks, CSV out")
    _add_graph_source(p)
    p.add_argument("--checks", default="sphere,pair,nice,lower")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--tolerance", type=float, default=0.2)
    p.add_argument("--min-pass", type=float, default=0.9)
    p.add_argument("--d", type=float)
    p.add_argument("--i", type=int)
    p.add_argument("--k", type=int, help="played-set half-size for the lower-bound check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_expansion)

    p = sub.add_parser("play", help="interactive session against an engine strategy")
    p.add_argument("--graph", required=True)
    p.add_argument("--kind", choices=["pair", "edge"], required=True)
    p.add_argument("--side", choices=["algorithm", "adversary"], required=True)
    p.add_argument("--opponent", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_play)

    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "play" and args.opponent is None:
        args.opponent = "adv-halving" if args.side == "algorithm" else "sp-elim"
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (GraphError, QueryError, InstanceError, StrategyError, BudgetExceededError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
