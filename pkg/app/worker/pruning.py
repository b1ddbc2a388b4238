from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import InvalidSizeError
from app.core.graph_model import RankOneUpdate, path_quadratic_form
from app.core.signals import ArSignalSource
from app.core.trig_kernels import TrigPlan
from app.worker.fast_transform import DctPlusPlan, check_signal, forward_from_dct, plan_dctplus

logger = logging.getLogger("fastdctplus")

CostFunction = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class PrunedEnsemblePlan:
    n: int
    members: tuple[DctPlusPlan, ...] = field(repr=False)
    c_p: int
    threshold: float
    crossover: int
    blocks: tuple[np.ndarray, ...] = field(repr=False)
    lower_blocks: tuple[np.ndarray, ...] = field(repr=False)
    # every member's head block, zero padded to n rows and stacked
    stacked: np.ndarray = field(repr=False)
    sqrt_lam: np.ndarray = field(repr=False)
    dct: TrigPlan = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.members) + 1

    @property
    def labels(self) -> list[str]:
        return ["dct", *(member.update.label for member in self.members)]


@dataclass(frozen=True)
class PrunedResult:
    coefficients: np.ndarray
    bounds: tuple[float, ...]
    pruned: bool
    quadratic_form: float


def l1_cost(coefficients: np.ndarray) -> float:
    return float(np.abs(coefficients).sum())


def calibrate_threshold(
    n: int,
    quantile: float | None = None,
    trials: int | None = None,
    r: float | None = None,
    seed: int | None = None,
) -> float:
    quantile = settings.prune_quantile if quantile is None else quantile
    trials = settings.trials if trials is None else trials
    source = ArSignalSource(
        r=settings.ar_coefficient if r is None else r,
        seed=settings.seed if seed is None else seed,
    )
    forms = [path_quadratic_form(s) for s in source.batch(n, trials)]
    threshold = float(np.quantile(forms, quantile))
    logger.warning(
        "Prune threshold calibrated n=%d quantile=%.2f trials=%d threshold=%.4f",
        n,
        quantile,
        trials,
        threshold,
    )
    return threshold


def plan_pruned(
    n: int,
    updates: Sequence[RankOneUpdate],
    c_p: int,
    threshold: float | None = None,
    epsilon: float | None = None,
    members: Sequence[DctPlusPlan] | None = None,
    crossover: int | None = None,
) -> PrunedEnsemblePlan:
    if not 1 <= c_p <= n:
        raise InvalidSizeError(f"c_p must satisfy 1 <= c_p <= {n}, got {c_p}")
    if members is None:
        members = [plan_dctplus(n, update, epsilon) for update in updates]
    if threshold is None:
        threshold = (
            settings.prune_threshold
            if settings.prune_threshold is not None
            else calibrate_threshold(n)
        )
    blocks = tuple(np.ascontiguousarray(member.block[:c_p, :c_p]) for member in members)
    lower = tuple(np.ascontiguousarray(member.block[c_p:, :c_p]) for member in members)
    stacked = np.zeros((len(members), n, c_p))
    for r, block in enumerate(blocks):
        stacked[r, :c_p] = block
    lam = members[0].base.lam if members else np.zeros(n)
    return PrunedEnsemblePlan(
        n=n,
        members=tuple(members),
        c_p=c_p,
        threshold=float(threshold),
        crossover=settings.nmvp_crossover if crossover is None else crossover,
        blocks=blocks,
        lower_blocks=lower,
        stacked=stacked.reshape(len(members) * n, c_p),
        sqrt_lam=np.sqrt(np.maximum(lam, 0.0)),
        dct=TrigPlan(n, "dct2"),
    )


def pruned_forward_all(
    plan: PrunedEnsemblePlan, s_i: np.ndarray, with_bounds: bool = True
) -> PrunedResult:
    """All k transforms; only the c_p heads when sum_k lam_k s_d[k]^2 <= threshold."""
    s_i = check_signal(s_i, plan.n, "signal")
    s_d = plan.dct(s_i)
    weighted = plan.sqrt_lam * s_d
    form = float(weighted @ weighted)
    if form > plan.threshold:
        coefficients = np.vstack(_fastest_members(plan.members, s_i, s_d, plan.crossover))
        return PrunedResult(coefficients, (0.0,) * plan.k if with_bounds else (), False, form)

    head = s_d[: plan.c_p]
    coefficients = np.empty((plan.k, plan.n))
    coefficients[0] = s_d
    coefficients[1:] = (plan.stacked @ head).reshape(plan.k - 1, plan.n)
    bounds: tuple[float, ...] = ()
    if with_bounds:
        # ||s_d[c_p:]|| + ||C_hl s_d[:c_p]|| bounds the truncation error of each member
        tail_norm = float(np.linalg.norm(s_d[plan.c_p :]))
        bounds = (
            0.0,
            *(tail_norm + float(np.linalg.norm(lower @ head)) for lower in plan.lower_blocks),
        )
    return PrunedResult(coefficients, bounds, True, form)


def _fastest_members(
    members: Sequence[DctPlusPlan], s_i: np.ndarray, s_d: np.ndarray, crossover: int
) -> list[np.ndarray]:
    if s_i.shape[0] < crossover:
        return [s_d, *(member.nmvp_matrix @ s_i for member in members)]
    return [s_d, *(forward_from_dct(member, s_d) for member in members)]


def direct_forward_all(
    members: Sequence[DctPlusPlan], s_i: np.ndarray, crossover: int | None = None
) -> list[np.ndarray]:
    crossover = settings.nmvp_crossover if crossover is None else crossover
    s_i = np.asarray(s_i, dtype=np.float64)
    s_d = members[0].dct(s_i) if members else TrigPlan(s_i.shape[0], "dct2")(s_i)
    return _fastest_members(members, s_i, s_d, crossover)


def select_index(result: PrunedResult, c_p: int, cost: CostFunction | None = None) -> int:
    """Lowest-cost member; pruned results are compared on their first c_p coefficients."""
    cost = l1_cost if cost is None else cost
    if result.pruned:
        costs = [cost(c[:c_p]) for c in result.coefficients]
    else:
        costs = [cost(c) for c in result.coefficients]
    return int(np.argmin(costs))


def rdo_select(
    plan: PrunedEnsemblePlan, s_i: np.ndarray, cost: CostFunction | None = None
) -> tuple[int, np.ndarray]:
    result = pruned_forward_all(plan, s_i, with_bounds=False)
    index = select_index(result, plan.c_p, cost)
    return index, result.coefficients[index]
