from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Protocol

import numpy as np
import scipy.linalg

from app.core.config import settings
from app.core.errors import (
    DeflationRequiredError,
    DimensionMismatchError,
    InvalidSizeError,
    InvalidUpdateError,
    NotSymmetricError,
    SecularConvergenceError,
    SingularPoleError,
)
from app.core.graph_model import GeneralizedLaplacian
from app.core.trig_kernels import dct2, idct2

logger = logging.getLogger("fastdctplus")

Rotation = tuple[int, int, float, float]

_EPS = np.finfo(np.float64).eps
_RESIDUAL_TOL = 1e-14
_POLE_TOL = 1e-14
_SIGN_TIE = 1e-9


class SpectralTransform(Protocol):
    @property
    def lam(self) -> np.ndarray: ...

    @property
    def n(self) -> int: ...

    def analysis(self, x: np.ndarray) -> np.ndarray: ...

    def synthesis(self, c: np.ndarray) -> np.ndarray: ...

    def matrix(self) -> np.ndarray: ...


@dataclass(frozen=True)
class SpectralBasis:
    lam: np.ndarray
    U: np.ndarray = field(repr=False)
    kind: Literal["path", "dense"] = "dense"

    def __post_init__(self) -> None:
        lam = np.array(self.lam, dtype=np.float64)
        basis = np.array(self.U, dtype=np.float64)
        if basis.shape != (lam.shape[0], lam.shape[0]):
            raise DimensionMismatchError(
                f"basis shape {basis.shape} does not match {lam.shape[0]} eigenvalues"
            )
        lam.setflags(write=False)
        basis.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "U", basis)

    @property
    def n(self) -> int:
        return int(self.lam.shape[0])

    def analysis(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "path":
            return dct2(x)
        return self.U.T @ np.asarray(x, dtype=np.float64)

    def synthesis(self, c: np.ndarray) -> np.ndarray:
        if self.kind == "path":
            return idct2(c)
        return self.U @ np.asarray(c, dtype=np.float64)

    def matrix(self) -> np.ndarray:
        return self.U


@dataclass(frozen=True)
class Deflation:
    kept: np.ndarray
    passed: np.ndarray
    z: np.ndarray = field(repr=False)
    rotations: tuple[Rotation, ...] = ()


@dataclass(frozen=True)
class PerturbedSpectrum:
    mu: np.ndarray
    z: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    deflation: Deflation = field(repr=False)
    root_positions: np.ndarray = field(repr=False)
    passed_positions: np.ndarray = field(repr=False)
    # root i == lam[kept][origin[i]] + offset[i], offsets kept exact
    origin: np.ndarray = field(repr=False)
    offset: np.ndarray = field(repr=False)

    @property
    def roots(self) -> np.ndarray:
        return self.mu[self.root_positions]


def path_spectrum(n: int) -> SpectralBasis:
    if n < 2:
        raise InvalidSizeError(f"path spectrum needs n >= 2, got {n}")
    k = np.arange(n)
    # 4 sin^2(k pi / 2n) == 2 - 2 cos(k pi / n), without cancellation near 0
    lam = 4.0 * np.sin(k * np.pi / (2 * n)) ** 2
    j = np.arange(n)
    basis = np.sqrt(2.0 / n) * np.cos(np.pi * np.outer(2 * j + 1, k) / (2 * n))
    basis[:, 0] = 1.0 / np.sqrt(n)
    return SpectralBasis(lam, basis, kind="path")


def column_signs(x: np.ndarray) -> np.ndarray:
    """+1/-1 per column so the largest-magnitude entry (lowest row on ties) is positive."""
    mags = np.abs(x)
    peak = mags.max(axis=0)
    first = np.argmax(mags >= (1.0 - _SIGN_TIE) * peak, axis=0)
    signs = np.sign(x[first, np.arange(x.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def dense_eigh(laplacian: GeneralizedLaplacian | np.ndarray) -> SpectralBasis:
    matrix = laplacian.matrix if isinstance(laplacian, GeneralizedLaplacian) else laplacian
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got {matrix.shape}")
    scale = max(1.0, float(np.abs(matrix).max(initial=0.0)))
    if np.abs(matrix - matrix.T).max(initial=0.0) > 1e-12 * scale:
        raise NotSymmetricError("dense eigensolver needs a symmetric matrix")
    lam, vectors = scipy.linalg.eigh(matrix)
    vectors = vectors * column_signs(vectors)
    return SpectralBasis(lam, vectors, kind="dense")


def apply_rotations(
    x: np.ndarray, rotations: tuple[Rotation, ...], inverse: bool = False
) -> np.ndarray:
    if not rotations:
        return np.asarray(x, dtype=np.float64)
    x = np.array(x, dtype=np.float64)
    ordered = reversed(rotations) if inverse else rotations
    for k, j, c, s in ordered:
        xk = x[k].copy()
        xj = x[j].copy()
        if inverse:
            x[k] = c * xk - s * xj
            x[j] = s * xk + c * xj
        else:
            x[k] = c * xk + s * xj
            x[j] = -s * xk + c * xj
    return x


def deflate(
    lam: np.ndarray, z: np.ndarray, tau: float | None = None, rho: float | None = None
) -> Deflation:
    lam = np.asarray(lam, dtype=np.float64)
    z = np.array(z, dtype=np.float64)
    if lam.shape != z.shape:
        raise DimensionMismatchError(f"lambda {lam.shape} and z {z.shape} differ")
    tau = settings.deflation_tol if tau is None else tau
    if tau < 0:
        raise InvalidSizeError(f"deflation tolerance must be >= 0, got {tau}")
    n = lam.shape[0]
    z_norm = float(np.linalg.norm(z))
    lam_norm = float(np.abs(lam).max(initial=0.0))
    small = np.abs(z) <= tau * z_norm
    if rho is not None:
        # |rho z_j| measured against the norm of the updated matrix
        coupling = abs(rho) * z_norm * np.abs(z)
        small |= coupling <= tau * max(lam_norm, abs(rho) * z_norm**2)
    z[small] = 0.0
    passed = set(np.flatnonzero(small).tolist())
    gap_tol = tau * lam_norm

    rotations: list[Rotation] = []
    rep: int | None = None
    for j in np.flatnonzero(~small).tolist():
        if rep is not None and lam[j] - lam[rep] <= gap_tol:
            r = float(np.hypot(z[rep], z[j]))
            c, s = float(z[rep] / r), float(z[j] / r)
            z[rep] = r
            z[j] = 0.0
            rotations.append((rep, j, c, s))
            passed.add(j)
        else:
            rep = j

    if rotations:
        logger.warning("Deflation rotated repeated eigenvalues count=%d", len(rotations))
    kept = np.array([i for i in range(n) if i not in passed], dtype=np.intp)
    return Deflation(
        kept=kept,
        passed=np.array(sorted(passed), dtype=np.intp),
        z=z,
        rotations=tuple(rotations),
    )


def _root_frames(
    lam: np.ndarray, z2: np.ndarray, rho: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = lam.shape[0]
    idx = np.arange(m)
    spread = abs(rho) * float(z2.sum())
    origin = np.empty(m, dtype=np.intp)
    lo = np.empty(m)
    hi = np.empty(m)
    lower, upper = idx[:-1], idx[1:]
    if rho > 0:
        outer, interior = m - 1, lower
        origin[outer], lo[outer], hi[outer] = outer, 0.0, spread
    else:
        outer, interior = 0, upper
        origin[outer], lo[outer], hi[outer] = outer, -spread, 0.0

    mid = 0.5 * (lam[lower] + lam[upper])
    f_mid = 1.0 / rho + (z2[None, :] / (lam[None, :] - mid[:, None])).sum(axis=1)
    near_lower = f_mid >= 0.0
    half = 0.5 * (lam[upper] - lam[lower])
    origin[interior] = np.where(near_lower, lower, upper)
    lo[interior] = np.where(near_lower, 0.0, -half)
    hi[interior] = np.where(near_lower, half, 0.0)
    return origin, lo, hi


def secular_roots(
    lam: np.ndarray, z: np.ndarray, rho: float, maxiter: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Roots of 1 + rho * sum z_j^2 / (lam_j - mu) as (pole index, offset from that pole)."""
    lam = np.asarray(lam, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if lam.shape != z.shape or lam.ndim != 1:
        raise DimensionMismatchError(f"lambda {lam.shape} and z {z.shape} differ")
    if rho == 0.0 or not np.isfinite(rho):
        raise InvalidUpdateError(f"secular equation needs a finite rho != 0, got {rho}")
    maxiter = settings.secular_maxiter if maxiter is None else maxiter
    m = lam.shape[0]
    if m == 0:
        return np.empty(0, dtype=np.intp), np.empty(0)
    if np.any(z == 0.0):
        raise DeflationRequiredError("z has zero components; deflate before solving")
    if np.any(np.diff(lam) <= 0.0):
        raise DeflationRequiredError("eigenvalues must be strictly increasing; deflate first")
    z2 = z * z
    if m == 1:
        return np.zeros(1, dtype=np.intp), rho * z2

    origin, lo, hi = _root_frames(lam, z2, rho)
    delta = lam[None, :] - lam[origin][:, None]
    inv_rho = 1.0 / rho
    tau = 0.5 * (lo + hi)
    active = np.ones(m, dtype=bool)

    for _ in range(maxiter):
        rows = np.flatnonzero(active)
        t = tau[rows]
        diff = delta[rows] - t[:, None]
        terms = z2[None, :] / diff
        f = inv_rho + terms.sum(axis=1)
        df = (terms / diff).sum(axis=1)
        scale = abs(inv_rho) + np.abs(terms).sum(axis=1)

        t_lo = np.where(f < 0.0, t, lo[rows])
        t_hi = np.where(f > 0.0, t, hi[rows])
        with np.errstate(divide="ignore", invalid="ignore"):
            step = t - f / df
        bad = ~np.isfinite(step) | (step <= t_lo) | (step >= t_hi)
        step = np.where(bad, 0.5 * (t_lo + t_hi), step)

        done = (
            (np.abs(f) <= _RESIDUAL_TOL * scale)
            | (t_hi - t_lo <= 4.0 * _EPS * np.maximum(np.abs(t_lo), np.abs(t_hi)))
            | (np.abs(step - t) <= 4.0 * _EPS * np.abs(t))
        )
        tau[rows] = np.where(done, t, step)
        lo[rows] = t_lo
        hi[rows] = t_hi
        active[rows[done]] = False
        if not active.any():
            break
    else:
        raise SecularConvergenceError(
            f"secular solver did not converge for {int(active.sum())} of {m} roots "
            f"after {maxiter} iterations"
        )
    return origin, tau


def secular_eigenvalues(
    lam: np.ndarray, z: np.ndarray, rho: float, maxiter: int | None = None
) -> np.ndarray:
    origin, offset = secular_roots(lam, z, rho, maxiter)
    return np.asarray(lam, dtype=np.float64)[origin] + offset


def pole_gaps(lam: np.ndarray, origin: np.ndarray, offset: np.ndarray) -> np.ndarray:
    """mu_i - lam_j without cancellation, from each root's pole index and offset."""
    lam = np.asarray(lam, dtype=np.float64)
    return (lam[origin][:, None] - lam[None, :]) + np.asarray(offset)[:, None]


def normalizers(
    lam: np.ndarray,
    mu: np.ndarray,
    z: np.ndarray,
    origin: np.ndarray | None = None,
    offset: np.ndarray | None = None,
) -> np.ndarray:
    """a_i = (sum_j z_j^2 / (mu_i - lam_j)^2)^(-1/2); unit-norm columns of the Cauchy basis."""
    lam = np.asarray(lam, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    z2 = np.asarray(z, dtype=np.float64) ** 2
    if z2.shape != lam.shape:
        raise DimensionMismatchError(f"lambda {lam.shape} and z {z2.shape} differ")
    exact = origin is not None and offset is not None
    pole_tol = 0.0 if exact else _POLE_TOL
    out = np.empty(mu.shape[0])
    block = max(1, (1 << 22) // max(1, lam.shape[0]))
    for start in range(0, mu.shape[0], block):
        rows = slice(start, start + block)
        if exact:
            diff = pole_gaps(lam, origin[rows], offset[rows])
        else:
            diff = mu[rows, None] - lam[None, :]
        if np.any(np.abs(diff) <= pole_tol):
            raise SingularPoleError("perturbed eigenvalue collides with a pole; deflation missing")
        out[rows] = 1.0 / np.sqrt((z2[None, :] / diff**2).sum(axis=1))
    return out


def perturbed_spectrum(
    lam: np.ndarray,
    z: np.ndarray,
    rho: float,
    tau: float | None = None,
    maxiter: int | None = None,
) -> PerturbedSpectrum:
    lam = np.asarray(lam, dtype=np.float64)
    deflation = deflate(lam, z, tau, rho)
    kept = deflation.kept
    origin, offset = secular_roots(lam[kept], deflation.z[kept], rho, maxiter)
    roots = lam[kept][origin] + offset
    a_roots = normalizers(lam[kept], roots, deflation.z[kept], origin, offset)

    n = lam.shape[0]
    m = kept.shape[0]
    values = np.concatenate([roots, lam[deflation.passed]])
    order = np.argsort(values, kind="stable")
    positions = np.empty(n, dtype=np.intp)
    positions[order] = np.arange(n)
    a = np.ones(n)
    a[positions[:m]] = a_roots
    logger.debug(
        "Perturbed spectrum done n=%d kept=%d passed=%d rotations=%d",
        n,
        m,
        n - m,
        len(deflation.rotations),
    )
    return PerturbedSpectrum(
        mu=values[order],
        z=deflation.z,
        a=a,
        deflation=deflation,
        root_positions=positions[:m],
        passed_positions=positions[m:],
        origin=origin,
        offset=offset,
    )
