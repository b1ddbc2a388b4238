from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from app.bench.schemas import BenchConfig, UpdateDescriptor, parse_update
from app.bench.tasks import run_bench
from app.core.config import settings
from app.core.errors import (
    USAGE_CODES,
    DimensionMismatchError,
    InvalidConfigError,
    classify_error,
)
from app.core.graph_model import update_from_graph
from app.core.signal_io import read_graph_spec, read_signal, write_csv, write_signal
from app.worker.fast_transform import forward, forward_nmvp, inverse, plan_dctplus

logger = logging.getLogger("fastdctplus")


def _int_list(raw: str) -> list[int]:
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    logging_opts = argparse.ArgumentParser(add_help=False)
    logging_opts.add_argument(
        "--log-level",
        default=settings.log_level,
        help="Logging level written to stderr (default from FASTDCTPLUS_LOG_LEVEL).",
    )

    bench_opts = argparse.ArgumentParser(add_help=False, parents=[logging_opts])
    bench_opts.add_argument("--sizes", type=_int_list, help="Graph sizes, e.g. 8,16,32.")
    bench_opts.add_argument("--trials", type=int, help="AR signals per cell.")
    bench_opts.add_argument(
        "--update",
        action="append",
        help="Update descriptor selfloop:i:w or edge:i:j:w (repeatable).",
    )
    bench_opts.add_argument("--eps", type=float, help="NFST precision.")
    bench_opts.add_argument("--seed", type=int, help="Seed for the PCG64 signal generator.")
    bench_opts.add_argument("--ar", type=float, help="AR(1) correlation coefficient.")
    bench_opts.add_argument("--warmup", type=int, help="Untimed calls before each timing loop.")
    bench_opts.add_argument("--cp", type=_int_list, help="Pruning keep-counts, e.g. 8,16,24.")
    bench_opts.add_argument("--threshold", type=float, help="Pruning quadratic-form threshold.")
    bench_opts.add_argument(
        "--crossover", type=int, help="Size from which the direct method uses Fast DCT+."
    )
    bench_opts.add_argument(
        "--no-crossover-search",
        dest="search_crossover",
        action="store_false",
        default=None,
        help="Runtime: do not grow sizes past --sizes looking for the crossover.",
    )
    bench_opts.add_argument("--out", type=Path, help="CSV output path (default stdout).")

    parser = argparse.ArgumentParser(
        prog="fastdctplus",
        description="Fast DCT+ graph Fourier transforms: accuracy, runtime and pruning benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("accuracy", parents=[bench_opts], help="SNR of Fast DCT+ against NMVP.")
    sub.add_parser("runtime", parents=[bench_opts], help="Runtime of DCT, Fast DCT+ and NMVP.")
    sub.add_parser("prune", parents=[bench_opts], help="Pruned ensemble versus direct method.")

    transform = sub.add_parser(
        "transform", parents=[logging_opts], help="Transform one signal read as text."
    )
    transform.add_argument("--input", default="-", help="Signal file (default stdin).")
    transform.add_argument("--output", default="-", help="Output file (default stdout).")
    transform.add_argument("--update", default="selfloop:1:1.5", help="Update descriptor.")
    transform.add_argument(
        "--graph", type=Path, help="Graph text file; must differ from the path by one update."
    )
    transform.add_argument("--inverse", action="store_true", help="Coefficients to signal.")
    transform.add_argument("--method", choices=("fast", "nmvp"), default="fast")
    transform.add_argument("--eps", type=float, default=None, help="NFST precision.")
    return parser


def _bench_config(args: argparse.Namespace) -> BenchConfig:
    values = {
        "sizes": args.sizes,
        "trials": args.trials,
        "updates": [UpdateDescriptor.parse(text) for text in args.update] if args.update else None,
        "epsilon": args.eps,
        "seed": args.seed,
        "ar_coefficient": args.ar,
        "warmup": args.warmup,
        "cp": args.cp,
        "threshold": args.threshold,
        "crossover": args.crossover,
        "search_crossover": args.search_crossover,
        "out": args.out,
    }
    return BenchConfig(mode=args.command, **{k: v for k, v in values.items() if v is not None})


def _run_transform(args: argparse.Namespace) -> None:
    signal = read_signal(args.input)
    n = signal.shape[0]
    if args.graph is not None:
        graph = read_graph_spec(args.graph)
        if graph.n != n:
            raise DimensionMismatchError(f"graph has {graph.n} nodes, signal has {n} values")
        update = update_from_graph(graph)
    else:
        update = parse_update(args.update, n)
    plan = plan_dctplus(n, update, args.eps)
    if args.inverse:
        result = inverse(plan, signal) if args.method == "fast" else plan.nmvp_matrix.T @ signal
    else:
        result = forward(plan, signal) if args.method == "fast" else forward_nmvp(plan, signal)
    write_signal(args.output, result)


def _configure_logging(level: str) -> None:
    name = str(level).upper()
    if not isinstance(logging.getLevelName(name), int):
        raise InvalidConfigError(f"unknown log level {level!r}")
    logging.basicConfig(
        level=name,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _configure_logging(args.log_level)
        if args.command == "transform":
            _run_transform(args)
        else:
            config = _bench_config(args)
            rows = run_bench(config)
            write_csv(config.out, rows)
            if config.out is not None:
                logger.info("CSV written path=%s rows=%d", config.out, len(rows))
    except Exception as exc:
        code, message = classify_error(exc)
        logger.debug("Command failed command=%s", args.command, exc_info=True)
        print(f"error: {code}: {message}", file=sys.stderr)
        return 2 if code in USAGE_CODES else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
