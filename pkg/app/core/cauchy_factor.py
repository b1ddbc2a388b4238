from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from app.core.errors import (
    DeflationRequiredError,
    DegenerateSpectrumError,
    DimensionMismatchError,
    InvalidUpdateError,
    SecularConvergenceError,
    SingularPoleError,
)
from app.core.graph_model import RankOneUpdate
from app.core.spectral import (
    Deflation,
    SpectralTransform,
    apply_rotations,
    column_signs,
    perturbed_spectrum,
    pole_gaps,
)

logger = logging.getLogger("fastdctplus")

_POLE_TOL = 1e-14


def _col(v: np.ndarray, like: np.ndarray) -> np.ndarray:
    return v.reshape((-1,) + (1,) * (like.ndim - 1))


def cauchy_matrix(mu: np.ndarray, lam: np.ndarray) -> np.ndarray:
    mu = np.asarray(mu, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    diff = mu[:, None] - lam[None, :]
    if np.any(np.abs(diff) <= _POLE_TOL):
        raise SingularPoleError("Cauchy nodes and poles share an entry")
    return 1.0 / diff


def cauchy_nmvp(mu: np.ndarray, lam: np.ndarray, s: np.ndarray) -> np.ndarray:
    """p_i = sum_j s_j / (mu_i - lam_j); ``s`` may carry extra columns."""
    s = np.asarray(s, dtype=np.float64)
    if s.ndim == 0 or s.shape[0] != np.shape(lam)[0]:
        raise DimensionMismatchError(
            f"Cauchy product needs {np.shape(lam)[0]} entries, got {s.shape}"
        )
    return cauchy_matrix(mu, lam) @ s


@dataclass(frozen=True)
class CauchyFactorization:
    """X = U M in rotated base coordinates.

    Root columns of M are sign_i * a_i * z / (mu_i - lam); passed-through
    columns are unit vectors.
    """

    lam: np.ndarray
    mu: np.ndarray
    z: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    signs: np.ndarray = field(repr=False)
    rho: float
    deflation: Deflation = field(repr=False)
    root_positions: np.ndarray = field(repr=False)
    passed_positions: np.ndarray = field(repr=False)
    root_origin: np.ndarray = field(repr=False)
    root_offset: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.lam.shape[0])

    @property
    def kept(self) -> np.ndarray:
        return self.deflation.kept

    @property
    def passed(self) -> np.ndarray:
        return self.deflation.passed

    @property
    def roots(self) -> np.ndarray:
        return self.mu[self.root_positions]

    @property
    def root_scale(self) -> np.ndarray:
        return (self.signs * self.a)[self.root_positions]

    def rotate(self, x: np.ndarray) -> np.ndarray:
        return apply_rotations(x, self.deflation.rotations)

    def unrotate(self, x: np.ndarray) -> np.ndarray:
        return apply_rotations(x, self.deflation.rotations, inverse=True)

    def cauchy_weights(self) -> np.ndarray:
        gaps = pole_gaps(self.lam[self.kept], self.root_origin, self.root_offset)
        if np.any(gaps == 0.0):
            raise SingularPoleError("perturbed eigenvalue collides with a pole; deflation missing")
        return 1.0 / gaps

    def cauchy_block(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        kept = self.kept
        block = self.cauchy_weights() * self.z[kept][None, :]
        out[np.ix_(self.root_positions, kept)] = self.root_scale[:, None] * block
        out[self.passed_positions, self.passed] = self.signs[self.passed_positions]
        return out

    def apply(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if t.ndim == 0 or t.shape[0] != self.n:
            raise DimensionMismatchError(f"expected {self.n} coefficients, got {t.shape}")
        kept = self.kept
        out = np.zeros_like(t)
        weighted = _col(self.z[kept], t) * t[kept]
        out[self.root_positions] = _col(self.root_scale, t) * (self.cauchy_weights() @ weighted)
        out[self.passed_positions] = _col(self.signs[self.passed_positions], t) * t[self.passed]
        return out

    def apply_transpose(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        if p.ndim == 0 or p.shape[0] != self.n:
            raise DimensionMismatchError(f"expected {self.n} coefficients, got {p.shape}")
        kept = self.kept
        out = np.zeros_like(p)
        w = _col(self.root_scale, p) * p[self.root_positions]
        out[kept] = _col(self.z[kept], p) * (self.cauchy_weights().T @ w)
        out[self.passed] = _col(self.signs[self.passed_positions], p) * p[self.passed_positions]
        return out


def factorize(
    base: SpectralTransform,
    update: RankOneUpdate,
    tau: float | None = None,
    maxiter: int | None = None,
) -> CauchyFactorization:
    if update.n != base.n:
        raise DimensionMismatchError(f"update has length {update.n}, base has size {base.n}")
    z = base.analysis(update.v)
    spectrum = perturbed_spectrum(base.lam, z, update.rho, tau, maxiter)
    unsigned = CauchyFactorization(
        lam=np.asarray(base.lam, dtype=np.float64),
        mu=spectrum.mu,
        z=spectrum.z,
        a=spectrum.a,
        signs=np.ones(base.n),
        rho=update.rho,
        deflation=spectrum.deflation,
        root_positions=spectrum.root_positions,
        passed_positions=spectrum.passed_positions,
        root_origin=spectrum.origin,
        root_offset=spectrum.offset,
    )
    basis = synthesize_basis(unsigned, base)
    signs = np.ones(base.n)
    signs[spectrum.root_positions] = column_signs(basis[:, spectrum.root_positions])
    return replace(unsigned, signs=signs)


def synthesize_basis(f: CauchyFactorization, base: SpectralTransform | np.ndarray) -> np.ndarray:
    block = f.unrotate(f.cauchy_block().T)
    if isinstance(base, np.ndarray):
        return base @ block
    return base.synthesis(block)


@dataclass(frozen=True)
class ProgressiveTransform:
    base: SpectralTransform
    factorization: CauchyFactorization

    @property
    def lam(self) -> np.ndarray:
        return self.factorization.mu

    @property
    def n(self) -> int:
        return self.factorization.n

    @property
    def stages(self) -> list[CauchyFactorization]:
        earlier = self.base.stages if isinstance(self.base, ProgressiveTransform) else []
        return [*earlier, self.factorization]

    def analysis(self, s: np.ndarray) -> np.ndarray:
        f = self.factorization
        return f.apply(f.rotate(self.base.analysis(s)))

    def synthesis(self, p: np.ndarray) -> np.ndarray:
        f = self.factorization
        return self.base.synthesis(f.unrotate(f.apply_transpose(p)))

    def matrix(self) -> np.ndarray:
        return self.synthesis(np.eye(self.n))


def progressive_forward(
    base: SpectralTransform, f: CauchyFactorization, s: np.ndarray
) -> np.ndarray:
    return ProgressiveTransform(base, f).analysis(s)


def progressive_inverse(
    base: SpectralTransform, f: CauchyFactorization, p: np.ndarray
) -> np.ndarray:
    return ProgressiveTransform(base, f).synthesis(p)


def compose_rank_k(
    base: SpectralTransform,
    updates: Sequence[RankOneUpdate],
    tau: float | None = None,
) -> ProgressiveTransform:
    if not updates:
        raise InvalidUpdateError("compose_rank_k needs at least one update")
    current: SpectralTransform = base
    for stage, update in enumerate(updates, start=1):
        try:
            f = factorize(current, update, tau)
        except (SecularConvergenceError, SingularPoleError, DeflationRequiredError) as exc:
            raise DegenerateSpectrumError(f"stage {stage}: {exc}") from exc
        logger.debug("Rank-k stage done stage=%d update=%s", stage, update.label)
        current = ProgressiveTransform(current, f)
    return current
