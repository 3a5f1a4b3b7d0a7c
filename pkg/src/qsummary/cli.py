"""Command-line front end.

Exit codes: 0 ok, 1 input/parse error, 2 configuration error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from typing import Iterator, Sequence

from .compaction import flush, process
from .core import Algorithm, new_summary
from .harness import RunConfig, run_verified
from .oracle import MAX_ORACLE_WEIGHT, ExactOracle
from .query import query_quantile, snapshot
from .streams import ORDERS, ParseError, StreamSpec, WeightDist, generate, generate_arrays, parse_line

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}") from None


def parse_epsilon(text: str) -> Fraction:
    eps = _fraction(text)
    if not 0 < eps < 1:
        raise ConfigError(f"epsilon must lie in (0, 1), got {text}")
    return eps


def parse_phis(text: str | None) -> list[tuple[str, Fraction]]:
    if not text:
        return []
    out = []
    for part in text.split(","):
        phi = _fraction(part)
        if not 0 <= phi <= 1:
            raise ConfigError(f"phi must lie in [0, 1], got {part.strip()}")
        out.append((part.strip(), phi))
    return out


def _spec(args) -> StreamSpec | None:
    if not args.gen:
        return None
    try:
        spec = StreamSpec.parse(args.gen)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.seed is not None:
        spec = StreamSpec(spec.n, spec.order, spec.weights, args.seed)
    return spec


def _numbered(lines) -> Iterator:
    for lineno, line in enumerate(lines, start=1):
        item = parse_line(line, lineno)
        if item is not None:
            yield lineno, item


def _items(args) -> Iterator:
    """``(line number, item)`` pairs; generated items count as lines."""
    spec = _spec(args)
    if spec is not None:
        yield from enumerate(generate(spec), start=1)
    elif args.input and args.input != "-":
        with open(args.input, encoding="utf-8") as fh:
            yield from _numbered(fh)
    else:
        yield from _numbered(sys.stdin)


def _check_algo_weights(algo: Algorithm, spec: StreamSpec | None) -> None:
    if spec is not None and spec.weights.kind != "unit" and not algo.weighted:
        raise ConfigError(f"algorithm {algo.value!r} needs unit weights, generator gives {spec.weights}")


def _stats_line(state) -> str:
    return f"{state.elements_seen},{state.total_weight},{state.current_time},{state.size}"


def cmd_summarize(args, out) -> int:
    eps = parse_epsilon(args.epsilon)
    phis = parse_phis(args.query)
    algo = Algorithm.parse(args.algo)
    _check_algo_weights(algo, _spec(args))
    try:
        state = new_summary(eps, algo, args.schedule, smooth=args.smooth)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    oracle = ExactOracle(state.ell) if args.verify else None
    interval = args.stats
    if interval is not None:
        print("elements_seen,total_weight,time_step,summary_size", file=out)
    next_stat = interval
    for lineno, item in _items(args):
        if item.weight != 1 and not algo.weighted:
            raise ParseError(lineno, f"algorithm {algo.value!r} accepts only unit weights")
        if oracle is not None:
            if oracle.total_weight + item.weight > MAX_ORACLE_WEIGHT:
                raise ConfigError(f"--verify is limited to total weight {MAX_ORACLE_WEIGHT}")
            oracle.add(item.value, item.weight)
        process(state, item.value, item.weight)
        if interval is not None and state.current_time >= next_stat:
            print(_stats_line(state), file=out)
            next_stat = (state.current_time // interval + 1) * interval
    flush(state)
    if interval is not None:
        print(_stats_line(state), file=out)
    print(f"summary_size={state.size}", file=out)
    print(f"effective_epsilon={state.effective_epsilon}", file=out)
    print(f"elements_seen={state.elements_seen}", file=out)
    print(f"total_weight={state.total_weight}", file=out)
    status = EXIT_OK
    if phis:
        if not state.entries:
            raise ParseError(0, "no stream items to query")
        snap = snapshot(state)
        print("phi,value,rmin,rmax", file=out)
        for text, phi in phis:
            value, bounds = query_quantile(snap, phi)
            print(f"{text},{value},{bounds.rmin},{bounds.rmax}", file=out)
            if oracle is not None and not oracle.check_answer(phi, value):
                print(f"verification failed: phi={text} answered {value}", file=sys.stderr)
                status = EXIT_VERIFY
    if oracle is not None and status == EXIT_OK:
        print("verify=pass", file=out)
    return status


def _csv_list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def bench_cell(algo: str, eps: Fraction, n: int, order: str, weights: WeightDist,
               seed: int, schedule: str = "paper") -> dict:
    """One benchmark cell: feed a generated stream and time it."""
    values, wts = generate_arrays(StreamSpec(n, order, weights, seed))
    state = new_summary(eps, algo, schedule)
    vals = values.tolist()
    start = time.perf_counter()
    if weights.kind == "unit":
        for v in vals:
            process(state, v)
    else:
        for v, w in zip(vals, wts.tolist()):
            process(state, v, w)
    flush(state)
    wall = time.perf_counter() - start
    return {"algorithm": algo, "epsilon": f"{float(eps):g}", "n": n, "order": order,
            "max_size": state.max_size, "post_flush_size": state.size,
            "wall_time_s": f"{wall:.3f}", "per_item_us": f"{1e6 * wall / max(n, 1):.3f}"}


BENCH_COLUMNS = ("algorithm", "epsilon", "n", "order", "max_size", "post_flush_size", "wall_time_s", "per_item_us")


def cmd_bench(args, out) -> int:
    algos = [Algorithm.parse(a) for a in _csv_list(args.algo or "greedy,gk,wgreedy,wgk")]
    epsilons = [parse_epsilon(e) for e in _csv_list(args.epsilon)]
    try:
        sizes = [int(x) for x in _csv_list(args.n)]
    except ValueError:
        raise ConfigError(f"bad --n list {args.n!r}") from None
    orders = _csv_list(args.order)
    for o in orders:
        if o not in ORDERS:
            raise ConfigError(f"unknown order {o!r}")
    try:
        weights = WeightDist.parse(args.weights)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for a in algos:
        _check_algo_weights(a, StreamSpec(0, "random", weights))
    print(",".join(BENCH_COLUMNS), file=out)
    cells = sorted((a.value, e, n, o) for a in algos for e in epsilons for n in sizes for o in orders)
    for a, e, n, o in cells:
        row = bench_cell(a, e, n, o, weights, args.seed or 0, args.schedule)
        print(",".join(str(row[c]) for c in BENCH_COLUMNS), file=out)
        out.flush()
    return EXIT_OK


def cmd_verify(args, out) -> int:
    eps = parse_epsilon(args.epsilon)
    algos = [Algorithm.parse(a) for a in _csv_list(args.algo or "greedy,gk,wgreedy,wgk")]
    spec = _spec(args) or StreamSpec(2000, "random", WeightDist(), args.seed or 0)
    if sum(int(w) for w in generate_arrays(spec)[1].tolist()) > MAX_ORACLE_WEIGHT:
        raise ConfigError(f"verify input exceeds the oracle limit of total weight {MAX_ORACLE_WEIGHT}")
    status = EXIT_OK
    print("algorithm,schedule,check,result,checked", file=out)
    for algo in algos:
        if spec.weights.kind != "unit" and not algo.weighted:
            print(f"{algo.value},{args.schedule},all,skipped-weighted-input,0", file=out)
            continue
        config = RunConfig(eps, algo.value, args.schedule, args.smooth, args.audit_every,
                           corrupt_delta_at=args.corrupt_delta)
        report = run_verified(generate(spec), config)
        for name, res in report.checks.items():
            print(f"{algo.value},{args.schedule},{name},{'pass' if res.passed else 'FAIL'},{res.checked}", file=out)
            if not res.passed and status == EXIT_OK:
                status = EXIT_VERIFY
                print(f"verification failed: {algo.value} {name} first failing state {res.first_failure}",
                      file=sys.stderr)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsummary", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, algo_default):
        p.add_argument("--epsilon", default="0.01", help="approximation parameter in (0,1)")
        p.add_argument("--algo", default=algo_default, help="greedy, gk, wgreedy or wgk")
        p.add_argument("--schedule", choices=("every", "paper"), default="paper")
        p.add_argument("--smooth", action="store_true", help="spread deletion work over arrivals")
        p.add_argument("--seed", type=int, default=None)

    s = sub.add_parser("summarize", help="summarize a stream and answer quantile queries")
    common(s, "wgk")
    s.add_argument("--query", help="comma-separated phi values, e.g. 0.5,0.99")
    s.add_argument("--stats", nargs="?", type=int, const=1, default=None, metavar="INTERVAL",
                   help="emit a stats line every INTERVAL time steps (default 1)")
    s.add_argument("--gen", help="generator spec order:weights:seed:n")
    s.add_argument("--verify", action="store_true", help="check answers against an exact oracle")
    s.add_argument("input", nargs="?", help="input file (default: standard input)")

    b = sub.add_parser("bench", help="CSV benchmark over a matrix of configurations")
    common(b, None)
    b.add_argument("--n", default="1000,10000", help="comma-separated stream lengths")
    b.add_argument("--order", default="random", help="comma-separated stream orders")
    b.add_argument("--weights", default="unit", help="unit, uniform-B or zipf-S-B")

    v = sub.add_parser("verify", help="run the invariant battery against an exact oracle")
    common(v, None)
    v.add_argument("--gen", help="generator spec order:weights:seed:n (default random:unit:SEED:2000)")
    v.add_argument("--audit-every", type=int, default=1, help="coverage audit interval in deletion steps")
    v.add_argument("--corrupt-delta", type=int, default=None, metavar="K",
                   help="fault injection: corrupt one entry's delta after K updates")
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "stats", None) is not None and args.stats < 1:
        print("error: --stats interval must be positive", file=sys.stderr)
        return EXIT_CONFIG
    handler = {"summarize": cmd_summarize, "bench": cmd_bench, "verify": cmd_verify}[args.command]
    try:
        return handler(args, out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
