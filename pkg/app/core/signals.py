from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from app.core.errors import InvalidConfigError, InvalidSizeError


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator; extra ``stream`` integers give independent, reproducible substreams."""
    return np.random.Generator(np.random.PCG64([seed, *stream]))


def gen_ar_signal(n: int, r: float, rng: np.random.Generator) -> np.ndarray:
    """Stationary AR(1): s_1 ~ N(0, 1 / (1 - r^2)), s_{j+1} = r s_j + N(0, 1)."""
    if not abs(r) < 1.0:
        raise InvalidConfigError(f"AR coefficient must satisfy |r| < 1, got {r}")
    if n < 1:
        raise InvalidSizeError(f"signal length must be >= 1, got {n}")
    noise = rng.standard_normal(n)
    noise[0] /= np.sqrt(1.0 - r * r)
    return scipy.signal.lfilter([1.0], [1.0, -r], noise)


@dataclass
class ArSignalSource:
    r: float = 0.99
    seed: int = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not abs(self.r) < 1.0:
            raise InvalidConfigError(f"AR coefficient must satisfy |r| < 1, got {self.r}")
        self.rng = make_rng(self.seed)

    def next(self, n: int) -> np.ndarray:
        return gen_ar_signal(n, self.r, self.rng)

    def batch(self, n: int, count: int) -> list[np.ndarray]:
        return [self.next(n) for _ in range(count)]
