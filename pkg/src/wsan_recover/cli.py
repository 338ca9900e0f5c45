"""``wsan-recover`` command line: generate topologies, run recoveries, compare results.

Exit codes: 0 success, 1 usage or validation error, 2 runtime/recovery error.
"""

from __future__ import annotations

import argparse
import io
import os
import sys

from . import io as files
from .metrics import EQUAL_TOLERANCE, SUMMARY_FIELDS, overhead_verdict, relative_gap, summarize_rows
from .recovery import RecoveryError, Strategy
from .scenarios import (
    DEFAULT_RANGE,
    Density,
    GenerationError,
    NoCutVertexError,
    ScenarioConfig,
    ScenarioError,
    generate_topology,
    generate_trial,
    pick_failure,
    pick_failure_2c,
    run_trial,
    trial_rng,
    trial_rows,
)
from .topology import articulation_points, average_degree, is_biconnected

ALGOS = {"rim": Strategy.RIM, "dara1c": Strategy.DARA1C, "dara2c": Strategy.DARA2C, "ledir": Strategy.LEDIR}
NEEDS_PARTITION = {Strategy.RIM, Strategy.DARA1C, Strategy.LEDIR}
THREADS_ENV = "WSAN_RECOVER_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _area(text: str) -> tuple[float, float]:
    try:
        w, h = text.lower().split("x")
        return float(w), float(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nodes", type=int, default=40, help="deployed node count N (>= 4)")
    p.add_argument("--range", type=float, default=DEFAULT_RANGE, dest="comm_range", help="communication range r in metres")
    p.add_argument("--density", choices=[d.value for d in Density], default=Density.DENSE.value)
    p.add_argument("--area", type=_area, default=None, help="deployment area WxH in metres (default: sized from density)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wsan-recover", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a random connected topology")
    _gen_flags(g)
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="fail a node and run recovery strategies")
    r.add_argument("--topology", help="topology JSON file (otherwise one is generated per trial)")
    _gen_flags(r)
    fail = r.add_mutually_exclusive_group()
    fail.add_argument("--fail", type=int, metavar="NODE_ID")
    fail.add_argument("--fail-random-cut", action="store_true", help="fail a random cut vertex (default)")
    r.add_argument("--algo", choices=[*ALGOS, "all"], default="all")
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--out", required=True)
    r.add_argument("--format", choices=["csv", "json"], default="csv")
    r.add_argument("--trace", help="write ordered relocation/message events as JSON")
    r.add_argument("--jobs", type=int, default=1, help=f"parallel workers (capped by ${THREADS_ENV})")

    c = sub.add_parser("compare", help="aggregate result files and compare LeDiR with RIM")
    c.add_argument("--in", nargs="+", required=True, dest="inputs", metavar="RESULTS")
    c.add_argument("--out", required=True)
    c.add_argument("--tolerance", type=float, default=EQUAL_TOLERANCE, help="relative gap counted as equal")
    return parser


def _config(args, trials: int = 1) -> ScenarioConfig:
    return ScenarioConfig(
        node_count=args.nodes,
        comm_range=args.comm_range,
        density=args.density,
        seed=args.seed,
        trials=trials,
        area=args.area,
    )


def cmd_generate(args) -> int:
    topo = generate_topology(_config(args))
    files.write_topology(args.out, topo)
    print(f"wrote {len(topo.nodes)} nodes to {args.out}; average degree {average_degree(topo):.3f}")
    return 0


def _workers(requested: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    n = max(1, requested)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise UsageError(f"${THREADS_ENV} must be an integer, got {cap!r}") from None
    return n


def _check_failure(topo, failed: int, strategies) -> None:
    topo.node(failed)
    if set(strategies) & NEEDS_PARTITION and failed not in articulation_points(topo):
        raise UsageError(
            f"node {failed} is not a cut vertex: its failure leaves the network connected, so "
            "rim/dara1c/ledir would not move anything. Fail a cut vertex or use --fail-random-cut."
        )
    if strategies == [Strategy.DARA2C] and not (len(topo.live_ids) >= 3 and is_biconnected(topo)):
        raise UsageError("dara2c needs a biconnected topology")


def _pick(topo, strategies, rng) -> int:
    if strategies == [Strategy.DARA2C]:
        return pick_failure_2c(topo, rng)
    return pick_failure(topo, rng)


def cmd_run(args) -> int:
    if args.trials < 0:
        raise UsageError("--trials must be >= 0")
    strategies = list(ALGOS.values()) if args.algo == "all" else [ALGOS[args.algo]]
    fixed = files.load_topology(args.topology) if args.topology else None
    config = None if fixed else _config(args, args.trials)

    jobs = []
    for i in range(args.trials):
        if fixed is not None:
            topo = fixed
            failed = args.fail if args.fail is not None else _pick(topo, strategies, trial_rng(args.seed, i))
        elif args.fail is not None:
            topo, failed = generate_topology(config, i), args.fail
        else:
            topo, failed = generate_trial(config, i)
        _check_failure(topo, failed, strategies)
        jobs.append((topo, failed, strategies, i))

    workers = _workers(args.jobs)
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]

    rows = [row for res in results for row in trial_rows(res)]
    text = files.results_json(rows) if args.format == "json" else files.results_csv(rows)
    files.atomic_write(args.out, text)
    if args.trace:
        runs = [(res.trial, run.report) for res in results for run in res.runs.values()]
        files.atomic_write(args.trace, files.trace_document(runs))
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _run_job(job):
    topo, failed, strategies, i = job
    return run_trial(topo, failed, strategies, i)


def summary_csv(stats: dict, verdicts: list[tuple[str, float, str]]) -> str:
    cols = ["algorithm", "runs", "recovered_rate"]
    for f in SUMMARY_FIELDS:
        cols += [f"{f}_mean", f"{f}_std"]
    buf = io.StringIO()
    buf.write(f"# version: {files.FORMAT_VERSION}\n")
    buf.write(",".join(cols) + "\n")
    for algo, s in stats.items():
        cells = [algo, str(int(s["runs"][0])), repr(s["recovered"][0])]
        for f in SUMMARY_FIELDS:
            cells += [repr(s[f][0]), repr(s[f][1])]
        buf.write(",".join(cells) + "\n")
    for metric, gap, verdict in verdicts:
        buf.write(f"# ledir_vs_rim,{metric},{gap!r},{verdict}\n")
    return buf.getvalue()


def compare_verdicts(stats: dict, tolerance: float = EQUAL_TOLERANCE) -> list[tuple[str, float, str]]:
    if "ledir" not in stats or "rim" not in stats:
        return []
    out = []
    for metric in ("relocated_nodes", "total_distance", "messages"):
        le, ri = stats["ledir"][metric][0], stats["rim"][metric][0]
        out.append((metric, relative_gap(le, ri), overhead_verdict(le, ri, tolerance)))
    return out


def cmd_compare(args) -> int:
    rows = []
    for path in args.inputs:
        got = files.read_results(path)
        if not got:
            raise files.FileFormatError(f"{path}: no result rows")
        rows += got
    stats = summarize_rows(rows)
    verdicts = compare_verdicts(stats, args.tolerance)
    files.atomic_write(args.out, summary_csv(stats, verdicts))

    print(f"{'algorithm':<8} {'runs':>5} {'recovered':>9} {'relocated':>16} {'distance':>20} {'messages':>14} {'extended':>14}")
    for algo, s in stats.items():
        def ms(f):
            return f"{s[f][0]:.2f}±{s[f][1]:.2f}"
        print(
            f"{algo:<8} {int(s['runs'][0]):>5} {s['recovered'][0]:>9.2%} {ms('relocated_nodes'):>16} "
            f"{ms('total_distance'):>20} {ms('messages'):>14} {ms('extended_paths'):>14}"
        )
    for metric, gap, verdict in verdicts:
        print(f"LeDiR vs RIM on {metric}: {verdict} (relative gap {gap:.1%}, equal within {args.tolerance:.0%})")
    return 0


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "compare": cmd_compare}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ScenarioError, GenerationError, NoCutVertexError, files.FileFormatError, OSError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"wsan-recover: error: {msg}", file=sys.stderr)
        return 1
    except RecoveryError as exc:
        print(f"wsan-recover: recovery failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
