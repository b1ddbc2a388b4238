from __future__ import annotations

import subprocess
import sys
from pathlib import Path

from app.core.signal_io import BenchRow, write_csv

ROOT_DIR = Path(__file__).resolve().parents[1]


def _rows(scale: float) -> list[BenchRow]:
    return [
        BenchRow("runtime", 16, "none", "dct", "mean_ns", 1000.0 * scale),
        BenchRow("runtime", 16, "selfloop:1:1.5", "fast", "mean_ns", 8000.0 * scale),
        BenchRow("runtime", 16, "selfloop:1:1.5", "fast", "p95_ns", 9000.0 * scale),
        BenchRow("runtime", 16, "selfloop:1:1.5", "nmvp", "mean_ns", 2000.0 * scale),
    ]


def test_benchmark_compare_prints_ratio_table(tmp_path: Path) -> None:
    base_path = tmp_path / "base.csv"
    new_path = tmp_path / "new.csv"
    write_csv(base_path, _rows(1.0))
    write_csv(new_path, _rows(0.5))

    result = subprocess.run(
        [
            sys.executable,
            "scripts/benchmark_compare.py",
            "--run",
            f"base={base_path}",
            "--run",
            f"new={new_path}",
        ],
        cwd=ROOT_DIR,
        capture_output=True,
        text=True,
        check=False,
    )

    assert result.returncode == 0, result.stderr
    assert "Runtime comparison" in result.stdout
    assert "new/base" in result.stdout
    lines = [line for line in result.stdout.splitlines() if line.startswith("| 16 |")]
    assert len(lines) == 3
    assert lines[0].split("|")[3].strip() == "dct"
    assert all(line.rstrip(" |").endswith("0.50") for line in lines)


def test_benchmark_compare_reports_missing_files(tmp_path: Path) -> None:
    present = tmp_path / "present.csv"
    write_csv(present, _rows(1.0))
    result = subprocess.run(
        [
            sys.executable,
            "scripts/benchmark_compare.py",
            "--run",
            f"a={present}",
            "--run",
            f"b={tmp_path / 'absent.csv'}",
        ],
        cwd=ROOT_DIR,
        capture_output=True,
        text=True,
        check=False,
    )

    assert result.returncode == 0, result.stderr
    assert "Missing result files:" in result.stdout
    assert "absent.csv" in result.stdout
