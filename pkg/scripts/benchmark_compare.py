from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from app.core.signal_io import BenchRow, read_csv  # noqa: E402

METHOD_ORDER = ("dct", "fast", "nmvp")


@dataclass(frozen=True)
class RunResult:
    name: str
    path: Path


def _default_runs() -> list[RunResult]:
    return [
        RunResult("base", Path("data/benchmarks/runtime-base.csv")),
        RunResult("new", Path("data/benchmarks/runtime-new.csv")),
    ]


def _parse_run_arg(raw: str) -> RunResult:
    if "=" not in raw:
        raise argparse.ArgumentTypeError("--run must look like name=path/to/runtime.csv")
    name, path = raw.split("=", 1)
    name = name.strip()
    if not name:
        raise argparse.ArgumentTypeError("run name cannot be empty")
    return RunResult(name=name, path=Path(path))


def _load_means(path: Path) -> dict[tuple[int, str, str], float]:
    rows: list[BenchRow] = read_csv(path)
    return {
        (row.size, row.update, row.method): row.value
        for row in rows
        if row.mode == "runtime" and row.metric == "mean_ns"
    }


def _ordered_keys(keys: set[tuple[int, str, str]]) -> list[tuple[int, str, str]]:
    def rank(key: tuple[int, str, str]) -> tuple[int, str, int, str]:
        size, update, method = key
        order = METHOD_ORDER.index(method) if method in METHOD_ORDER else len(METHOD_ORDER)
        return size, update, order, method

    return sorted(keys, key=rank)


def _fmt(value: float | None, digits: int = 1) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}f}"


def _build_table(runs: list[RunResult], by_run: dict[str, dict]) -> str:
    header_cols = ["size", "update", "method"]
    header_cols.extend(f"{run.name}_mean_us" for run in runs)
    if len(runs) >= 2:
        header_cols.append(f"{runs[1].name}/{runs[0].name}")

    header = "| " + " | ".join(header_cols) + " |"
    sep = "| " + " | ".join(["---:", "---", "---", *(["---:"] * (len(header_cols) - 3))]) + " |"

    keys: set[tuple[int, str, str]] = set()
    for means in by_run.values():
        keys.update(means.keys())

    lines = [header, sep]
    for key in _ordered_keys(keys):
        size, update, method = key
        cells = [str(size), update, method]
        means = [by_run[run.name].get(key) for run in runs]
        cells.extend(_fmt(None if m is None else m / 1e3, digits=2) for m in means)
        if len(runs) >= 2:
            base, other = means[0], means[1]
            ratio = other / base if base and other is not None and base > 0 else None
            cells.append(_fmt(ratio, digits=2))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines)


def main() -> None:
    parser = argparse.ArgumentParser(
        description="Compare fastdctplus runtime CSVs and print a Markdown table of mean times."
    )
    parser.add_argument(
        "--run",
        action="append",
        type=_parse_run_arg,
        help="Runtime CSV to compare, e.g. --run base=a.csv --run new=b.csv",
    )
    args = parser.parse_args()

    runs = args.run if args.run else _default_runs()

    by_run: dict[str, dict] = {}
    missing: list[str] = []
    for run in runs:
        if not run.path.exists():
            missing.append(f"{run.name}: {run.path}")
            by_run[run.name] = {}
            continue
        by_run[run.name] = _load_means(run.path)

    if missing:
        print("Missing result files:")
        for item in missing:
            print(f"- {item}")
        print()

    print("Runtime comparison")
    print(_build_table(runs, by_run))


if __name__ == "__main__":
    main()
