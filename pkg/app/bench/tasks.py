from __future__ import annotations

import logging
import math
import time
from functools import partial
from typing import Callable

import numpy as np

from app.bench.schemas import BenchConfig, UpdateDescriptor
from app.core.metrics import finite_mean, psnr_db, snr_db, summarize_runs
from app.core.signal_io import BenchRow
from app.core.signals import gen_ar_signal, make_rng
from app.core.trig_kernels import TrigPlan
from app.worker.fast_transform import DctPlusPlan, forward, forward_nmvp, inverse, plan_dctplus
from app.worker.pruning import (
    PrunedEnsemblePlan,
    PrunedResult,
    calibrate_threshold,
    direct_forward_all,
    l1_cost,
    plan_pruned,
    pruned_forward_all,
    select_index,
)

logger = logging.getLogger("fastdctplus")

_BOUND_SLACK = 1e-9
_CROSSOVER_CAP = 1024
_CROSSOVER_TRIALS = 20
# DST-I, two real FFTs and the gridding stencil, per n log2 n
_FAST_COST_FACTOR = 4.0


def _signals(config: BenchConfig, n: int) -> list[np.ndarray]:
    rng = make_rng(config.seed, n)
    return [gen_ar_signal(n, config.ar_coefficient, rng) for _ in range(config.trials)]


def _time_calls(
    fn: Callable[[np.ndarray], object], signals: list[np.ndarray], warmup: int
) -> list[float]:
    for _ in range(warmup):
        fn(signals[0])
    runs: list[float] = []
    for s in signals:
        start = time.perf_counter_ns()
        fn(s)
        runs.append(float(time.perf_counter_ns() - start))
    return runs


def run_accuracy(config: BenchConfig) -> list[BenchRow]:
    rows: list[BenchRow] = []
    for n in config.sizes:
        signals = _signals(config, n)
        for desc in config.updates:
            plan = plan_dctplus(n, desc.to_update(n), config.epsilon)
            snrs: list[float] = []
            roundtrips: list[float] = []
            parseval: list[float] = []
            for s in signals:
                coefficients = forward(plan, s)
                snrs.append(snr_db(forward_nmvp(plan, s), coefficients))
                roundtrips.append(snr_db(s, inverse(plan, coefficients)))
                parseval.append(abs(np.linalg.norm(coefficients) / np.linalg.norm(s) - 1.0))
            metrics = {
                "snr_db_mean": finite_mean(snrs),
                "snr_db_min": min(snrs),
                "roundtrip_snr_db_mean": finite_mean(roundtrips),
                "parseval_max_dev": max(parseval),
            }
            rows.extend(
                BenchRow("accuracy", n, desc.label, "fast", metric, value)
                for metric, value in metrics.items()
            )
            logger.info(
                "Accuracy done n=%d update=%s snr_mean=%.1f snr_min=%.1f roundtrip=%.1f",
                n,
                desc.label,
                metrics["snr_db_mean"],
                metrics["snr_db_min"],
                metrics["roundtrip_snr_db_mean"],
            )
    return rows


def _timing_rows(
    n: int, update: str, method: str, runs: list[float], dct_mean: float
) -> list[BenchRow]:
    summary = summarize_runs(runs)
    ratio = summary["mean"] / dct_mean if dct_mean > 0 else 0.0
    return [
        BenchRow("runtime", n, update, method, "mean_ns", summary["mean"]),
        BenchRow("runtime", n, update, method, "p50_ns", summary["p50"]),
        BenchRow("runtime", n, update, method, "p95_ns", summary["p95"]),
        BenchRow("runtime", n, update, method, "ratio_to_dct", ratio),
    ]


def _time_update(
    config: BenchConfig, n: int, desc: UpdateDescriptor, signals: list[np.ndarray]
) -> tuple[DctPlusPlan, list[float], list[float]]:
    plan = plan_dctplus(n, desc.to_update(n), config.epsilon)
    fast_runs = _time_calls(partial(forward, plan), signals, config.warmup)
    nmvp_runs = _time_calls(partial(forward_nmvp, plan), signals, config.warmup)
    return plan, fast_runs, nmvp_runs


def _search_crossover(config: BenchConfig, desc: UpdateDescriptor, start: int) -> int | None:
    """First doubling of ``start`` at which Fast DCT+ beats the dense product."""
    n = start
    trials = min(config.trials, _CROSSOVER_TRIALS)
    while n <= _CROSSOVER_CAP:
        rng = make_rng(config.seed, n)
        signals = [gen_ar_signal(n, config.ar_coefficient, rng) for _ in range(trials)]
        _, fast_runs, nmvp_runs = _time_update(config, n, desc, signals)
        if np.mean(fast_runs) < np.mean(nmvp_runs):
            return n
        n *= 2
    return None


def run_runtime(config: BenchConfig) -> list[BenchRow]:
    rows: list[BenchRow] = []
    crossover: dict[str, int | None] = {desc.label: None for desc in config.updates}
    for n in config.sizes:
        signals = _signals(config, n)
        dct_runs = _time_calls(TrigPlan(n, "dct2"), signals, config.warmup)
        dct_mean = summarize_runs(dct_runs)["mean"]
        rows.extend(_timing_rows(n, "none", "dct", dct_runs, dct_mean))
        for desc in config.updates:
            plan, fast_runs, nmvp_runs = _time_update(config, n, desc, signals)
            fast_mean = summarize_runs(fast_runs)["mean"]
            nmvp_mean = summarize_runs(nmvp_runs)["mean"]
            faster = fast_mean < nmvp_mean
            rows.extend(_timing_rows(n, desc.label, "fast", fast_runs, dct_mean))
            rows.extend(_timing_rows(n, desc.label, "nmvp", nmvp_runs, dct_mean))
            rows.append(
                BenchRow("runtime", n, desc.label, "fast", "setup_ns", plan.setup_seconds * 1e9)
            )
            rows.append(
                BenchRow("runtime", n, desc.label, "fast", "faster_than_nmvp", float(faster))
            )
            if faster and crossover[desc.label] is None:
                crossover[desc.label] = n
            logger.info(
                "Runtime done n=%d update=%s fast_ratio=%.2f nmvp_ratio=%.2f",
                n,
                desc.label,
                fast_mean / dct_mean if dct_mean > 0 else 0.0,
                nmvp_mean / dct_mean if dct_mean > 0 else 0.0,
            )
    largest = max(config.sizes)
    for desc in config.updates:
        size = crossover[desc.label]
        if size is None and config.search_crossover:
            size = _search_crossover(config, desc, 2 * largest)
        rows.append(
            BenchRow(
                "runtime",
                size or largest,
                desc.label,
                "fast",
                "crossover_size",
                float(size) if size is not None else math.inf,
            )
        )
        logger.info("Runtime crossover update=%s size=%s", desc.label, size or "none")
    return rows


def modeled_cost(n: int, crossover: int) -> float:
    """Multiply count of one member at its fastest implementation."""
    if n < crossover:
        return float(n * n)
    return _FAST_COST_FACTOR * n * math.log2(n)


def _modeled_speedup(plan: PrunedEnsemblePlan, results: list[PrunedResult]) -> float:
    """Direct over pruned multiply counts, independent of interpreter overhead."""
    n, members = plan.n, plan.k - 1
    dct = n * math.log2(n)
    member = modeled_cost(n, plan.crossover)
    direct = len(results) * (dct + members * member)
    pruned = sum(
        dct + n + members * (plan.c_p**2 if result.pruned else member) for result in results
    )
    return direct / pruned if pruned > 0 else 0.0


def run_prune(config: BenchConfig) -> list[BenchRow]:
    rows: list[BenchRow] = []
    for n in config.sizes:
        updates = [desc.to_update(n) for desc in config.updates]
        members = [plan_dctplus(n, update, config.epsilon) for update in updates]
        label = "+".join(["dct", *(desc.label for desc in config.updates)])
        signals = _signals(config, n)
        threshold = config.threshold
        if threshold is None:
            threshold = calibrate_threshold(
                n, trials=config.trials, r=config.ar_coefficient, seed=config.seed + 1
            )

        direct = partial(direct_forward_all, members, crossover=config.crossover)
        direct_runs = _time_calls(direct, signals, config.warmup)
        direct_total = sum(direct_runs)
        references = [direct(s) for s in signals]
        peak = max(float(np.abs(s).max()) for s in signals)

        for c_p in config.cp_values(n):
            plan = plan_pruned(
                n, updates, c_p, threshold, members=members, crossover=config.crossover
            )
            timed = partial(pruned_forward_all, plan, with_bounds=False)
            pruned_runs = _time_calls(timed, signals, config.warmup)
            pruned_total = sum(pruned_runs)
            results = [pruned_forward_all(plan, s) for s in signals]

            errors: list[float] = []
            exact: list[np.ndarray] = []
            approx: list[np.ndarray] = []
            violations = 0
            agree = 0
            for result, reference in zip(results, references):
                for r in range(1, plan.k):
                    diff = result.coefficients[r] - reference[r]
                    errors.append(float(np.mean(diff**2)))
                    exact.append(reference[r])
                    approx.append(result.coefficients[r])
                    slack = _BOUND_SLACK * max(1.0, float(np.linalg.norm(reference[r])))
                    if result.pruned and np.linalg.norm(diff) > result.bounds[r] + slack:
                        violations += 1
                pruned_pick = select_index(result, plan.c_p)
                direct_pick = int(np.argmin([l1_cost(c) for c in reference]))
                agree += int(pruned_pick == direct_pick)

            mean_mse = float(np.mean(errors)) if errors else 0.0
            psnr = (
                psnr_db(np.concatenate(exact), np.concatenate(approx), peak=peak)
                if errors
                else math.inf
            )
            metrics = {
                "aggregate_runtime_ns": pruned_total,
                "direct_runtime_ns": direct_total,
                "speedup": direct_total / pruned_total if pruned_total > 0 else 0.0,
                "modeled_speedup": _modeled_speedup(plan, results),
                "mean_mse": mean_mse,
                "max_mse": max(errors) if errors else 0.0,
                "psnr_db": psnr,
                "selection_agreement": agree / float(len(signals)),
                "prune_rate": sum(r.pruned for r in results) / float(len(signals)),
                "bound_violations": float(violations),
                "threshold": float(threshold),
            }
            method = f"pruned_cp{c_p}"
            rows.extend(
                BenchRow("prune", n, label, method, metric, value)
                for metric, value in metrics.items()
            )
            logger.info(
                "Prune done n=%d c_p=%d speedup=%.2f modeled=%.2f psnr=%.1f agreement=%.3f "
                "prune_rate=%.3f",
                n,
                c_p,
                metrics["speedup"],
                metrics["modeled_speedup"],
                psnr,
                metrics["selection_agreement"],
                metrics["prune_rate"],
            )
    return rows


RUNNERS: dict[str, Callable[[BenchConfig], list[BenchRow]]] = {
    "accuracy": run_accuracy,
    "runtime": run_runtime,
    "prune": run_prune,
}


def run_bench(config: BenchConfig) -> list[BenchRow]:
    start = time.perf_counter()
    logger.info(
        "Bench start mode=%s sizes=%s trials=%d eps=%.1e seed=%d",
        config.mode,
        ",".join(str(n) for n in config.sizes),
        config.trials,
        config.epsilon,
        config.seed,
    )
    rows = RUNNERS[config.mode](config)
    logger.info(
        "Bench done mode=%s rows=%d seconds=%.2f",
        config.mode,
        len(rows),
        time.perf_counter() - start,
    )
    return rows
