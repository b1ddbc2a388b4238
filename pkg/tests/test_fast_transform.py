from dataclasses import replace

import numpy as np
import pytest

from app.core.errors import DimensionMismatchError, InvalidConfigError, NonFiniteInputError
from app.core.graph_model import RankOneUpdate, apply_rank_one, path_laplacian
from app.core.metrics import snr_db
from app.core.signals import gen_ar_signal, make_rng
from app.core.spectral import dense_eigh
from app.core.trig_kernels import dct2
from app.worker.fast_transform import (
    forward,
    forward_from_dct,
    forward_nmvp,
    inverse,
    plan_dctplus,
)

SIZES = [8, 16, 32, 64, 128, 256]


def _updates(n: int) -> list[RankOneUpdate]:
    return [
        RankOneUpdate.self_loop(n, 1, 1.5),
        RankOneUpdate.edge(n, 2, 3, 1.5),
        RankOneUpdate.edge(n, 3, 5, 1.5),
    ]


def _ar_signals(n: int, count: int = 10) -> list[np.ndarray]:
    rng = make_rng(0, n)
    return [gen_ar_signal(n, 0.99, rng) for _ in range(count)]


@pytest.mark.parametrize("n", SIZES)
def test_forward_matches_dense_transform(n: int):
    for update in _updates(n):
        plan = plan_dctplus(n, update, 1e-12)
        for s in _ar_signals(n):
            assert snr_db(forward_nmvp(plan, s), forward(plan, s)) >= 100.0


def test_two_node_self_loop_example():
    update = RankOneUpdate.self_loop(2, 1, 1.0)
    plan = plan_dctplus(2, update, 1e-12)
    f = plan.factorization
    assert np.allclose(np.abs(f.z), [1.0 / np.sqrt(2.0)] * 2)
    assert np.allclose(plan.mu, [(3.0 - np.sqrt(5.0)) / 2.0, (3.0 + np.sqrt(5.0)) / 2.0])
    assert f.a[0] == pytest.approx(0.525731, abs=1e-6)
    reference = dense_eigh(apply_rank_one(path_laplacian(2), update))
    s = np.array([0.3, -1.2])
    assert np.allclose(forward(plan, s), reference.U.T @ s, atol=1e-12)


def test_forward_on_update_direction_and_negative_weight():
    n = 24
    for update in (RankOneUpdate.edge(n, 3, 5, 1.5), RankOneUpdate.self_loop(n, n, -0.3)):
        plan = plan_dctplus(n, update, 1e-12)
        s = update.v / np.linalg.norm(update.v)
        assert np.allclose(forward(plan, s), forward_nmvp(plan, s), atol=1e-10)


def test_forward_matches_dense_eigh_up_to_convention():
    n = 16
    update = RankOneUpdate.self_loop(n, 1, 1.5)
    plan = plan_dctplus(n, update, 1e-12)
    reference = dense_eigh(apply_rank_one(path_laplacian(n), update))
    s = _ar_signals(n, 1)[0]
    assert np.allclose(forward(plan, s), reference.U.T @ s, atol=1e-8 * np.linalg.norm(s))


def test_outermost_root_is_evaluated_directly():
    n = 16
    up = plan_dctplus(n, RankOneUpdate.self_loop(n, 1, 1.5))
    assert int(np.argmax(up.mu)) in up.direct_positions.tolist()
    down = plan_dctplus(n, RankOneUpdate.self_loop(n, 1, -0.5))
    assert int(np.argmin(down.mu)) in down.direct_positions.tolist()


def test_edge_update_passes_dc_component():
    n = 16
    plan = plan_dctplus(n, RankOneUpdate.edge(n, 2, 3, 1.5))
    assert 0 in plan.factorization.passed.tolist()
    s = np.full(n, 2.0)
    coefficients = forward(plan, s)
    assert abs(coefficients[0]) == pytest.approx(2.0 * np.sqrt(n))
    assert np.allclose(coefficients[1:], 0.0, atol=1e-10)


def test_precision_controls_accuracy():
    n = 64
    update = RankOneUpdate.edge(n, 3, 5, 1.5)
    loose = plan_dctplus(n, update, 1e-3)
    tight = plan_dctplus(n, update, 1e-12)
    signals = _ar_signals(n, 20)
    loose_snr = np.mean([snr_db(forward_nmvp(loose, s), forward(loose, s)) for s in signals])
    tight_snr = np.mean([snr_db(forward_nmvp(tight, s), forward(tight, s)) for s in signals])
    assert loose_snr < tight_snr


@pytest.mark.parametrize("method", ["fast", "cauchy"])
def test_inverse_roundtrip(method: str):
    n = 32
    rng = np.random.default_rng(5)
    for update in _updates(n):
        plan = plan_dctplus(n, update, 1e-12)
        s = rng.standard_normal(n)
        assert snr_db(s, inverse(plan, forward(plan, s), method=method)) >= 100.0


def test_inverse_matches_dense_synthesis():
    n = 20
    plan = plan_dctplus(n, RankOneUpdate.self_loop(n, 1, 1.5), 1e-12)
    p = np.random.default_rng(8).standard_normal(n)
    assert np.allclose(inverse(plan, p), plan.nmvp_matrix.T @ p, atol=1e-10)


def test_dense_block_path_agrees_with_fast_path():
    n = 16
    plan = plan_dctplus(n, RankOneUpdate.edge(n, 2, 3, 1.5), 1e-12)
    dense = replace(plan, slow_path=True)
    s = _ar_signals(n, 1)[0]
    assert np.allclose(forward_from_dct(dense, dct2(s)), forward(plan, s), atol=1e-10)
    p = forward(plan, s)
    assert np.allclose(inverse(dense, p), inverse(plan, p), atol=1e-10)


def test_input_validation():
    n = 8
    plan = plan_dctplus(n, RankOneUpdate.self_loop(n, 1, 1.5))
    with pytest.raises(DimensionMismatchError):
        forward(plan, np.ones(n + 1))
    bad = np.ones(n)
    bad[3] = np.nan
    with pytest.raises(NonFiniteInputError):
        forward(plan, bad)
    with pytest.raises(NonFiniteInputError):
        inverse(plan, bad)
    with pytest.raises(InvalidConfigError):
        inverse(plan, np.ones(n), method="qr")  # type: ignore[arg-type]


@pytest.mark.parametrize("n", [9, 17, 33, 64])
@pytest.mark.parametrize("weight", [1e-12, -1e-12])
def test_vanishing_weight_reduces_to_dct(n: int, weight: float):
    plan = plan_dctplus(n, RankOneUpdate.self_loop(n, 1, weight), 1e-12)
    assert plan.factorization.passed.size == n
    s = _ar_signals(n, 1)[0]
    assert np.allclose(forward(plan, s), dct2(s), atol=1e-12 * np.linalg.norm(s))
    assert np.allclose(inverse(plan, dct2(s)), s, atol=1e-12 * np.linalg.norm(s))


@pytest.mark.parametrize("weight", [1e-9, -1e-9, 1e-10])
def test_tiny_weight_keeps_basis_orthonormal(weight: float):
    n = 16
    plan = plan_dctplus(n, RankOneUpdate.self_loop(n, 1, weight), 1e-12)
    x = plan.nmvp_matrix
    assert np.abs(x @ x.T - np.eye(n)).max() <= 1e-10
    s = _ar_signals(n, 1)[0]
    assert snr_db(s, inverse(plan, forward(plan, s))) >= 100.0
    assert snr_db(forward_nmvp(plan, s), forward(plan, s)) >= 100.0


def test_plan_holds_trig_plans():
    n = 12
    plan = plan_dctplus(n, RankOneUpdate.edge(n, 2, 3, 1.5))
    assert (plan.dct.kind, plan.idct.kind, plan.dst.kind) == ("dct2", "idct2", "dst1")
    assert plan.dct.n == plan.idct.n == plan.dst.n == n
    assert plan.dst.length == n - 1
    s = _ar_signals(n, 1)[0]
    assert np.array_equal(plan.dct(s), dct2(s))
    assert plan.direct_matrix.shape == (plan.direct_positions.size, n)
