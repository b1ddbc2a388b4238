from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from app.core.errors import (
    AngleRangeError,
    DimensionMismatchError,
    InvalidSizeError,
    PrecisionRangeError,
)

logger = logging.getLogger("fastdctplus")

DEFAULT_OVERSAMPLING = 2.0
_MIN_OVERSAMPLING = 1.25
_WIDTH_MARGIN = 2


@dataclass(frozen=True)
class NfstPlan:
    """Gaussian gridding plan for sum_k c_k sin(k theta_i), k = 1..m."""

    m: int
    theta: np.ndarray = field(repr=False)
    epsilon: float
    oversampling: float
    half_width: int
    grid_size: int
    tau: float
    stencil: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    deconv: np.ndarray = field(repr=False)
    spectral_weights: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.theta.shape[0])


def kernel_half_width(epsilon: float, oversampling: float = DEFAULT_OVERSAMPLING) -> int:
    rate = math.pi * (oversampling - 1.0) / (oversampling - 0.5)
    return int(math.ceil(math.log(1.0 / epsilon) / rate)) + _WIDTH_MARGIN


def plan_nfst(
    theta: np.ndarray,
    m: int,
    epsilon: float,
    oversampling: float = DEFAULT_OVERSAMPLING,
) -> NfstPlan:
    theta = np.array(theta, dtype=np.float64).reshape(-1)
    if m < 1:
        raise InvalidSizeError(f"sine series needs m >= 1 harmonics, got {m}")
    if not 0.0 < epsilon < 1.0:
        raise PrecisionRangeError(f"epsilon must lie in (0, 1), got {epsilon}")
    if oversampling < _MIN_OVERSAMPLING:
        raise InvalidSizeError(
            f"oversampling must be >= {_MIN_OVERSAMPLING}, got {oversampling}"
        )
    if theta.size and not (
        np.all(np.isfinite(theta)) and np.all(theta > 0.0) and np.all(theta < np.pi)
    ):
        raise AngleRangeError("NFST angles must lie strictly inside (0, pi)")

    modes = 2 * (m + 1)
    grid_size = 2 * int(math.ceil(oversampling * modes / 2))
    half_width = kernel_half_width(epsilon, oversampling)
    tau = math.pi * half_width / (modes**2 * oversampling * (oversampling - 0.5))
    h = 2.0 * math.pi / grid_size

    offsets = np.arange(-half_width + 1, half_width + 1)
    nearest = np.floor(theta / h).astype(np.int64)
    idx = nearest[:, None] + offsets[None, :]
    weights = np.exp(-((theta[:, None] - h * idx) ** 2) / (4.0 * tau))

    k = np.arange(1, m + 1)
    deconv = np.sqrt(np.pi / tau) * np.exp(k**2 * tau)
    logger.debug(
        "NFST plan done m=%d points=%d half_width=%d grid=%d",
        m,
        theta.size,
        half_width,
        grid_size,
    )
    return NfstPlan(
        m=m,
        theta=theta,
        epsilon=float(epsilon),
        oversampling=float(oversampling),
        half_width=half_width,
        grid_size=grid_size,
        tau=tau,
        stencil=np.mod(idx, grid_size),
        weights=weights,
        deconv=deconv,
        spectral_weights=-0.5j * deconv,
    )


def nfst_exec(plan: NfstPlan, c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (plan.m,):
        raise DimensionMismatchError(f"expected {plan.m} coefficients, got {c.shape}")
    spectrum = np.zeros(plan.grid_size // 2 + 1, dtype=np.complex128)
    spectrum[1 : plan.m + 1] = c * plan.spectral_weights
    grid = scipy.fft.irfft(spectrum, n=plan.grid_size)
    return (plan.weights * grid[plan.stencil]).sum(axis=1)


def nfst_adjoint(plan: NfstPlan, values: np.ndarray) -> np.ndarray:
    """Transpose of :func:`nfst_exec`: b_k = sum_i v_i sin(k theta_i)."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (plan.size,):
        raise DimensionMismatchError(f"expected {plan.size} values, got {values.shape}")
    grid = np.bincount(
        plan.stencil.ravel(),
        weights=(plan.weights * values[:, None]).ravel(),
        minlength=plan.grid_size,
    )
    spectrum = scipy.fft.rfft(grid)
    return -spectrum[1 : plan.m + 1].imag * plan.deconv / plan.grid_size


def nfst_direct(theta: np.ndarray, c: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    c = np.asarray(c, dtype=np.float64)
    k = np.arange(1, c.shape[0] + 1)
    return np.sin(np.outer(theta, k)) @ c
