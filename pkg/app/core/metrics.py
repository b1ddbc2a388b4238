from __future__ import annotations

import math

import numpy as np

from app.core.errors import DimensionMismatchError, InvalidConfigError


def _pair(reference: np.ndarray, test: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.shape != test.shape:
        raise DimensionMismatchError(f"shapes differ: {reference.shape} vs {test.shape}")
    return reference, test


def snr_db(reference: np.ndarray, test: np.ndarray) -> float:
    reference, test = _pair(reference, test)
    signal = float(np.sum(reference**2))
    if signal == 0.0:
        raise InvalidConfigError("SNR needs a nonzero reference")
    noise = float(np.sum((reference - test) ** 2))
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(signal / noise)


def mse(reference: np.ndarray, test: np.ndarray) -> float:
    reference, test = _pair(reference, test)
    return float(np.mean((reference - test) ** 2))


def psnr_db(reference: np.ndarray, test: np.ndarray, peak: float | None = None) -> float:
    """10 log10(peak^2 / MSE); peak defaults to max |reference|."""
    reference, test = _pair(reference, test)
    peak = float(np.abs(reference).max(initial=0.0)) if peak is None else peak
    if peak <= 0.0:
        raise InvalidConfigError("PSNR needs a positive peak")
    error = mse(reference, test)
    if error == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / error)


def finite_mean(values: list[float]) -> float:
    data = np.asarray(values, dtype=np.float64)
    finite = data[np.isfinite(data)]
    if finite.size == 0:
        return math.inf if data.size else 0.0
    return float(finite.mean())


def summarize_runs(elapsed_runs: list[float]) -> dict[str, float]:
    runs = np.asarray(elapsed_runs, dtype=np.float64)
    if runs.size == 0:
        return dict.fromkeys(("mean", "p50", "p95", "min", "max"), 0.0)
    p50, p95 = np.percentile(runs, [50.0, 95.0])
    return {
        "mean": float(runs.mean()),
        "p50": float(p50),
        "p95": float(p95),
        "min": float(runs.min()),
        "max": float(runs.max()),
    }
