"""Fast DCT+ transforms: path-graph GFTs after one rank-one update.

The Cauchy stage after the DCT-II is a sine series in acos(1 - mu / 2) for
every root inside (0, 4), computed with one DST-I and one NFST. The outermost
root and any root outside (0, 4) are evaluated directly.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from app.core.cauchy_factor import CauchyFactorization, factorize, synthesize_basis
from app.core.config import settings
from app.core.errors import DimensionMismatchError, InvalidConfigError, NonFiniteInputError
from app.core.graph_model import RankOneUpdate
from app.core.nfst import NfstPlan, nfst_adjoint, nfst_exec, plan_nfst
from app.core.spectral import SpectralBasis, path_spectrum
from app.core.trig_kernels import TrigPlan

logger = logging.getLogger("fastdctplus")

InverseMethod = Literal["fast", "cauchy"]

_SLOW_PATH_GAP = 1e-10


@dataclass(frozen=True)
class DctPlusPlan:
    n: int
    update: RankOneUpdate
    epsilon: float
    base: SpectralBasis = field(repr=False)
    factorization: CauchyFactorization = field(repr=False)
    dct: TrigPlan = field(repr=False)
    idct: TrigPlan = field(repr=False)
    dst: TrigPlan = field(repr=False)
    fast_positions: np.ndarray = field(repr=False)
    direct_positions: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    inv_sin: np.ndarray = field(repr=False)
    recip: np.ndarray = field(repr=False)
    direct_weights: np.ndarray = field(repr=False)
    h_weights: np.ndarray = field(repr=False)
    # fused per-plan constants of the fast and direct rows
    hz: np.ndarray = field(repr=False)
    fast_gain: np.ndarray = field(repr=False)
    fast_dc: np.ndarray = field(repr=False)
    direct_matrix: np.ndarray = field(repr=False)
    passed_signs: np.ndarray = field(repr=False)
    nfst: NfstPlan | None = field(repr=False)
    block: np.ndarray = field(repr=False)
    nmvp_matrix: np.ndarray = field(repr=False)
    slow_path: bool = False
    setup_seconds: float = 0.0

    @property
    def mu(self) -> np.ndarray:
        return self.factorization.mu

    @property
    def rho_sign(self) -> int:
        return 1 if self.update.rho > 0 else -1


def check_signal(x: np.ndarray, n: int, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise DimensionMismatchError(f"{what} has shape {x.shape}, expected ({n},)")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError(f"{what} contains NaN or infinite values")
    return x


def plan_dctplus(
    n: int,
    update: RankOneUpdate,
    epsilon: float | None = None,
    tau: float | None = None,
) -> DctPlusPlan:
    start = time.perf_counter()
    epsilon = settings.epsilon if epsilon is None else epsilon
    base = path_spectrum(n)
    f = factorize(base, update, tau)

    roots = f.roots
    inside = (roots > 0.0) & (roots < 4.0)
    if roots.size:
        outer = int(np.argmax(roots)) if update.rho > 0 else int(np.argmin(roots))
        inside[outer] = False
    fast_rows = np.flatnonzero(inside)
    direct_rows = np.flatnonzero(~inside)
    fast_mu = roots[fast_rows]

    theta = 2.0 * np.arctan2(np.sqrt(fast_mu), np.sqrt(4.0 - fast_mu))
    j = np.arange(1, n)
    h_weights = np.where(j % 2 == 1, 1.0, -1.0) / np.sin(j * np.pi / n)
    nfst = plan_nfst(theta, n - 1, epsilon) if fast_rows.size else None
    inv_sin = 1.0 / np.sin(n * theta)
    recip = 1.0 / fast_mu

    scale = f.root_scale
    fast_scale = scale[fast_rows]
    direct_weights = f.cauchy_weights()[direct_rows]
    direct_matrix = np.zeros((direct_rows.size, n))
    direct_matrix[:, f.kept] = scale[direct_rows, None] * direct_weights * f.z[f.kept]

    block = f.unrotate(f.cauchy_block().T).T
    gap = np.inf
    if fast_rows.size:
        gap = float(np.abs(fast_mu[:, None] - base.lam[None, :]).min())
    slow_path = bool(gap < _SLOW_PATH_GAP * base.lam[-1])

    plan = DctPlusPlan(
        n=n,
        update=update,
        epsilon=float(epsilon),
        base=base,
        factorization=f,
        dct=TrigPlan(n, "dct2"),
        idct=TrigPlan(n, "idct2"),
        dst=TrigPlan(n, "dst1"),
        fast_positions=f.root_positions[fast_rows],
        direct_positions=f.root_positions[direct_rows],
        theta=theta,
        inv_sin=inv_sin,
        recip=recip,
        direct_weights=direct_weights,
        h_weights=h_weights,
        hz=h_weights * f.z[1:],
        fast_gain=-0.5 * inv_sin * fast_scale,
        fast_dc=fast_scale * recip * f.z[0],
        direct_matrix=direct_matrix,
        passed_signs=f.signs[f.passed_positions],
        nfst=nfst,
        block=block,
        nmvp_matrix=synthesize_basis(f, base).T,
        slow_path=slow_path,
        setup_seconds=time.perf_counter() - start,
    )
    if slow_path:
        logger.warning(
            "Plan near a pole; using dense Cauchy path n=%d update=%s gap=%.3e",
            n,
            update.label,
            gap,
        )
    logger.info(
        "Plan build done n=%d update=%s fast=%d direct=%d passed=%d seconds=%.4f",
        n,
        update.label,
        fast_rows.size,
        direct_rows.size,
        f.passed.size,
        plan.setup_seconds,
    )
    return plan


def forward_from_dct(plan: DctPlusPlan, s_d: np.ndarray) -> np.ndarray:
    if plan.slow_path:
        return plan.block @ s_d
    f = plan.factorization
    rotated = f.rotate(s_d)
    out = np.empty(plan.n)
    out[f.passed_positions] = plan.passed_signs * rotated[f.passed]
    if plan.direct_positions.size:
        out[plan.direct_positions] = plan.direct_matrix @ rotated
    if plan.nfst is not None:
        series = nfst_exec(plan.nfst, plan.dst(plan.hz * rotated[1:]))
        out[plan.fast_positions] = plan.fast_gain * series + plan.fast_dc * rotated[0]
    return out


def forward(plan: DctPlusPlan, s_i: np.ndarray) -> np.ndarray:
    s_i = check_signal(s_i, plan.n, "signal")
    return forward_from_dct(plan, plan.dct(s_i))


def forward_nmvp(plan: DctPlusPlan, s_i: np.ndarray) -> np.ndarray:
    return plan.nmvp_matrix @ np.asarray(s_i, dtype=np.float64)


def inverse(plan: DctPlusPlan, p_a: np.ndarray, method: InverseMethod = "fast") -> np.ndarray:
    """Signal whose forward transform is ``p_a``; the fast path is the exact transpose."""
    p_a = check_signal(p_a, plan.n, "coefficients")
    f = plan.factorization
    if method == "cauchy":
        return plan.idct(f.unrotate(f.apply_transpose(p_a)))
    if method != "fast":
        raise InvalidConfigError(f"unknown inverse method {method!r}; use 'fast' or 'cauchy'")
    if plan.slow_path:
        return plan.idct(plan.block.T @ p_a)

    y = np.zeros(plan.n)
    if plan.nfst is not None:
        p_fast = p_a[plan.fast_positions]
        y[0] = p_fast @ plan.fast_dc
        y[1:] = plan.hz * plan.dst(nfst_adjoint(plan.nfst, plan.fast_gain * p_fast))
    if plan.direct_positions.size:
        y += plan.direct_matrix.T @ p_a[plan.direct_positions]
    y[f.passed] = plan.passed_signs * p_a[f.passed_positions]
    return plan.idct(f.unrotate(y))
