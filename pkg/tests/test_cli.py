from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import numpy as np

from app.core.graph_model import GraphSpec, RankOneUpdate, graph_with_update
from app.core.signal_io import format_signal, read_csv, write_graph_spec
from app.worker.fast_transform import forward_nmvp, plan_dctplus

ROOT_DIR = Path(__file__).resolve().parents[1]


def _cli(*args: str, stdin: str | None = None) -> subprocess.CompletedProcess[str]:
    return subprocess.run(
        [sys.executable, "-m", "app.bench.cli", *args],
        cwd=ROOT_DIR,
        input=stdin,
        capture_output=True,
        text=True,
        check=False,
    )


def _values(text: str) -> np.ndarray:
    return np.array([float(tok) for tok in text.split()])


def test_transform_forward_matches_dense_and_inverts():
    signal = np.linspace(-1.0, 2.0, 16) ** 2
    result = _cli("transform", "--update", "edge:2:3:1.5", stdin=format_signal(signal))
    assert result.returncode == 0, result.stderr
    coefficients = _values(result.stdout)
    plan = plan_dctplus(16, RankOneUpdate.edge(16, 2, 3, 1.5))
    assert np.allclose(coefficients, forward_nmvp(plan, signal), atol=1e-10)

    back = _cli(
        "transform", "--update", "edge:2:3:1.5", "--inverse", stdin=format_signal(coefficients)
    )
    assert back.returncode == 0, back.stderr
    assert np.allclose(_values(back.stdout), signal, atol=1e-10)


def test_transform_from_graph_file(tmp_path: Path):
    n = 12
    graph = graph_with_update(GraphSpec.path(n), RankOneUpdate.self_loop(n, 1, 1.5))
    graph_path = tmp_path / "graph.txt"
    write_graph_spec(graph_path, graph)
    signal_path = tmp_path / "signal.txt"
    signal_path.write_text(format_signal(np.arange(n, dtype=float)), encoding="utf-8")
    out_path = tmp_path / "coefficients.txt"

    result = _cli(
        "transform",
        "--graph",
        str(graph_path),
        "--input",
        str(signal_path),
        "--output",
        str(out_path),
        "--method",
        "nmvp",
    )
    assert result.returncode == 0, result.stderr
    plan = plan_dctplus(n, RankOneUpdate.self_loop(n, 1, 1.5))
    expected = forward_nmvp(plan, np.arange(n, dtype=float))
    assert np.allclose(_values(out_path.read_text(encoding="utf-8")), expected)


def test_accuracy_writes_csv(tmp_path: Path):
    out = tmp_path / "accuracy.csv"
    result = _cli(
        "accuracy",
        "--sizes",
        "8,16",
        "--trials",
        "3",
        "--update",
        "selfloop:1:1.5",
        "--out",
        str(out),
        "--log-level",
        "warning",
    )
    assert result.returncode == 0, result.stderr
    rows = read_csv(out)
    assert {row.size for row in rows} == {8, 16}
    assert {row.update for row in rows} == {"selfloop:1:1.5"}
    assert all(row.value >= 100.0 for row in rows if row.metric == "snr_db_mean")


def test_runtime_prints_csv_to_stdout():
    result = _cli(
        "runtime",
        "--sizes",
        "8",
        "--trials",
        "2",
        "--warmup",
        "0",
        "--update",
        "edge:2:3:1.5",
        "--no-crossover-search",
    )
    assert result.returncode == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "mode,size,update,method,metric,value"
    assert any(line.startswith("runtime,8,none,dct,mean_ns,") for line in lines)
    assert any(",crossover_size," in line for line in lines)


def test_prune_with_explicit_threshold():
    result = _cli(
        "prune",
        "--sizes",
        "16",
        "--trials",
        "5",
        "--cp",
        "8",
        "--threshold",
        "1e9",
        "--warmup",
        "0",
    )
    assert result.returncode == 0, result.stderr
    assert "pruned_cp8,prune_rate,1.000000e+00" in result.stdout


def test_usage_errors_exit_two():
    result = _cli("accuracy", "--update", "loop:1:1.5")
    assert result.returncode == 2
    assert "error: INVALID_UPDATE:" in result.stderr

    result = _cli("accuracy", "--sizes", "1", "--trials", "1")
    assert result.returncode == 2
    assert "error: INVALID_CONFIG:" in result.stderr

    result = _cli("runtime", "--eps", "2")
    assert result.returncode == 2
    assert "INVALID_CONFIG" in result.stderr

    result = _cli("bogus")
    assert result.returncode == 2

    result = _cli("transform", "--log-level", "loud", stdin="1 2 3 4\n")
    assert result.returncode == 2
    assert "error: INVALID_CONFIG: unknown log level" in result.stderr


def test_runtime_errors_exit_one(tmp_path: Path):
    result = _cli("transform", stdin="1 2 nan 4\n")
    assert result.returncode == 1
    assert "error: NAN_INPUT:" in result.stderr

    result = _cli("transform", "--input", str(tmp_path / "missing.txt"))
    assert result.returncode == 1
    assert "error: IO_ERROR: file not found" in result.stderr

    graph_path = tmp_path / "graph.txt"
    write_graph_spec(graph_path, GraphSpec.path(6))
    result = _cli("transform", "--graph", str(graph_path), stdin="1 2 3 4 5 6\n")
    assert result.returncode == 1
    assert "error: INVALID_GRAPH:" in result.stderr
