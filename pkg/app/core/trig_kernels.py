from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Literal

import numpy as np
import scipy.fft
from scipy.special import eval_chebyu

from app.core.errors import DimensionMismatchError, InvalidSizeError

TrigKind = Literal["dct2", "idct2", "dst1"]


def _as_signal(x: np.ndarray, min_length: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0 or x.shape[0] < min_length:
        raise InvalidSizeError(
            f"transform needs length >= {min_length} along axis 0, got {x.shape}"
        )
    return x


def _dst1_unchecked(h: np.ndarray) -> np.ndarray:
    if h.shape[0] == 1:
        return 2.0 * h
    return scipy.fft.dst(h, type=1, axis=0)


_KERNELS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "dct2": partial(scipy.fft.dct, type=2, norm="ortho", axis=0),
    "idct2": partial(scipy.fft.idct, type=2, norm="ortho", axis=0),
    "dst1": _dst1_unchecked,
}


def dct2(s: np.ndarray) -> np.ndarray:
    """Orthonormal DCT-II along axis 0; equals U^T s for the path-graph basis."""
    return _KERNELS["dct2"](_as_signal(s, 2))


def idct2(p: np.ndarray) -> np.ndarray:
    return _KERNELS["idct2"](_as_signal(p, 2))


def dst1(h: np.ndarray) -> np.ndarray:
    """DST-I with the factor-2 convention: c_l = 2 * sum_j h_j sin(l j pi / (len + 1))."""
    return _dst1_unchecked(_as_signal(h, 1))


@dataclass(frozen=True)
class TrigPlan:
    n: int
    kind: TrigKind
    kernel: Callable[[np.ndarray], np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidSizeError(f"trig plan needs n >= 2, got {self.n}")
        if self.kind not in _KERNELS:
            raise InvalidSizeError(f"unknown trig kernel {self.kind!r}")
        object.__setattr__(self, "kernel", _KERNELS[self.kind])

    @property
    def length(self) -> int:
        return self.n - 1 if self.kind == "dst1" else self.n

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 0 or x.shape[0] != self.length:
            raise DimensionMismatchError(
                f"{self.kind} plan for n={self.n} expects length {self.length}, got {x.shape}"
            )
        return self.kernel(x)


def chebyshev_u(m: int, x: np.ndarray | float) -> np.ndarray | float:
    if m < 0:
        raise InvalidSizeError(f"Chebyshev order must be >= 0, got {m}")
    return eval_chebyu(m, x)


def u_roots(n: int) -> np.ndarray:
    """Roots of U_{n-1}: cos(k pi / n) for k = 1..n-1, descending."""
    if n < 2:
        raise InvalidSizeError(f"u_roots needs n >= 2, got {n}")
    return np.cos(np.arange(1, n) * np.pi / n)
