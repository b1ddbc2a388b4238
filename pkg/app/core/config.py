from __future__ import annotations

import os
from dataclasses import dataclass

try:
    from dotenv import load_dotenv
except Exception:
    load_dotenv = None

if load_dotenv is not None:
    load_dotenv()

DEFAULT_SIZES = (8, 16, 32, 64, 128, 256)
DEFAULT_UPDATES = ("selfloop:1:1.5", "edge:2:3:1.5", "edge:3:5:1.5")
DEFAULT_PRUNE_UPDATES = ("selfloop:1:1.5", "edge:2:3:1.5")
DEFAULT_PRUNE_SIZES = (32,)


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return float(raw)
    except ValueError:
        return default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def _env_optional_float(name: str) -> float | None:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return None
    try:
        return float(raw)
    except ValueError:
        return None


@dataclass(frozen=True)
class Settings:
    epsilon: float = _env_float("FASTDCTPLUS_EPSILON", 1e-12)
    deflation_tol: float = _env_float("FASTDCTPLUS_DEFLATION_TOL", 1e-12)
    secular_maxiter: int = _env_int("FASTDCTPLUS_SECULAR_MAXITER", 200)
    trials: int = _env_int("FASTDCTPLUS_TRIALS", 1000)
    seed: int = _env_int("FASTDCTPLUS_SEED", 0)
    ar_coefficient: float = _env_float("FASTDCTPLUS_AR_COEFFICIENT", 0.99)
    prune_quantile: float = _env_float("FASTDCTPLUS_PRUNE_QUANTILE", 0.7)
    prune_threshold: float | None = _env_optional_float("FASTDCTPLUS_PRUNE_THRESHOLD")
    nmvp_crossover: int = _env_int("FASTDCTPLUS_NMVP_CROSSOVER", 64)
    warmup: int = _env_int("FASTDCTPLUS_WARMUP", 3)
    log_level: str = os.getenv("FASTDCTPLUS_LOG_LEVEL", "INFO")


settings = Settings()
