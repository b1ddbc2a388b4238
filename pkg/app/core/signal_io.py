from __future__ import annotations

import argparse
import csv
import io
import sys
import tempfile
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from app.core.errors import InvalidConfigError
from app.core.graph_model import GraphSpec, format_graph_spec, parse_graph_spec

CSV_HEADER = ("mode", "size", "update", "method", "metric", "value")


@dataclass(frozen=True)
class BenchRow:
    mode: str
    size: int
    update: str
    method: str
    metric: str
    value: float


def _read_text(path: str | Path | None, stdin: TextIO | None = None) -> str:
    if path is None or str(path) == "-":
        return (stdin or sys.stdin).read()
    return Path(path).read_text(encoding="utf-8")


def parse_signal(text: str) -> np.ndarray:
    try:
        values = np.array([float(tok) for tok in text.split()], dtype=np.float64)
    except ValueError as exc:
        raise InvalidConfigError(f"signal text holds a non-numeric token: {exc}") from exc
    return values


def read_signal(path: str | Path | None = None, stdin: TextIO | None = None) -> np.ndarray:
    """Whitespace-separated decimals from a file, or stdin for ``None``/``-``."""
    return parse_signal(_read_text(path, stdin))


def format_signal(values: np.ndarray) -> str:
    return "\n".join(f"{v:.17g}" for v in np.asarray(values, dtype=np.float64)) + "\n"


def write_signal(
    path: str | Path | None, values: np.ndarray, stdout: TextIO | None = None
) -> None:
    text = format_signal(values)
    if path is None or str(path) == "-":
        (stdout or sys.stdout).write(text)
        return
    Path(path).write_text(text, encoding="utf-8")


def read_graph_spec(path: str | Path) -> GraphSpec:
    return parse_graph_spec(_read_text(path))


def write_graph_spec(path: str | Path, g: GraphSpec) -> None:
    Path(path).write_text(format_graph_spec(g), encoding="utf-8")


def format_csv(rows: Iterable[BenchRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        mode, size, update, method, metric, value = astuple(row)
        writer.writerow([mode, size, update, method, metric, f"{value:.6e}"])
    return buffer.getvalue()


def write_csv(path: str | Path | None, rows: Iterable[BenchRow]) -> None:
    text = format_csv(rows)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_csv(path: str | Path) -> list[BenchRow]:
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise InvalidConfigError(f"{path}: unexpected CSV header {reader.fieldnames}")
        return [
            BenchRow(
                mode=r["mode"],
                size=int(r["size"]),
                update=r["update"],
                method=r["method"],
                metric=r["metric"],
                value=float(r["value"]),
            )
            for r in reader
        ]


def _selftest() -> None:
    signal = np.array([0.5, -1.25, 3.0, 1e-20])
    assert np.array_equal(parse_signal(format_signal(signal)), signal)
    g = GraphSpec(n=3, edges=((1, 2, 1.0), (2, 3, 1.0)), self_loops=((1, 1.5),))
    with tempfile.TemporaryDirectory() as tmpdir:
        tmpdir_path = Path(tmpdir)
        write_graph_spec(tmpdir_path / "g.txt", g)
        assert read_graph_spec(tmpdir_path / "g.txt") == g
        rows = [BenchRow("accuracy", 8, "selfloop:1:1.5", "fast", "snr_db_mean", 140.0)]
        write_csv(tmpdir_path / "out.csv", rows)
        assert read_csv(tmpdir_path / "out.csv") == rows


def main() -> None:
    parser = argparse.ArgumentParser(description="signal_io helper")
    parser.add_argument("--selftest", action="store_true", help="run self-test")
    args = parser.parse_args()
    if args.selftest:
        _selftest()
        print("signal_io selftest ok")


if __name__ == "__main__":
    main()
