import numpy as np
import pytest

from app.core import spectral
from app.core.cauchy_factor import (
    ProgressiveTransform,
    cauchy_matrix,
    cauchy_nmvp,
    compose_rank_k,
    factorize,
    progressive_forward,
    progressive_inverse,
    synthesize_basis,
)
from app.core.config import Settings
from app.core.errors import (
    DegenerateSpectrumError,
    DimensionMismatchError,
    InvalidUpdateError,
    SingularPoleError,
)
from app.core.graph_model import (
    GraphSpec,
    RankOneUpdate,
    apply_rank_one,
    build_laplacian,
    graph_with_update,
    path_laplacian,
)
from app.core.spectral import dense_eigh, path_spectrum


def _updated(n: int, update: RankOneUpdate) -> np.ndarray:
    return apply_rank_one(path_laplacian(n), update).matrix


def test_cauchy_nmvp_matches_definition():
    mu = np.array([0.5, 1.5, 2.5])
    lam = np.array([0.0, 1.0])
    s = np.array([2.0, -1.0])
    expected = [2.0 / 0.5 - 1.0 / -0.5, 2.0 / 1.5 - 1.0 / 0.5, 2.0 / 2.5 - 1.0 / 1.5]
    assert np.allclose(cauchy_nmvp(mu, lam, s), expected)
    with pytest.raises(SingularPoleError):
        cauchy_matrix(np.array([1.0]), lam)
    with pytest.raises(DimensionMismatchError):
        cauchy_nmvp(mu, lam, np.ones(3))


@pytest.mark.parametrize(
    "update",
    [
        RankOneUpdate.self_loop(12, 1, 1.5),
        RankOneUpdate.edge(12, 2, 3, 1.5),
        RankOneUpdate.edge(12, 3, 5, -0.4),
        RankOneUpdate.general(0.8, np.linspace(-1.0, 1.0, 12)),
    ],
)
def test_synthesized_basis_diagonalizes_updated_laplacian(update: RankOneUpdate):
    n = 12
    base = path_spectrum(n)
    f = factorize(base, update)
    basis = synthesize_basis(f, base)
    laplacian = _updated(n, update)
    assert np.allclose(basis.T @ basis, np.eye(n), atol=1e-11)
    assert np.allclose(laplacian @ basis, basis * f.mu, atol=1e-10)
    assert np.allclose(f.mu, np.linalg.eigvalsh(laplacian), atol=1e-12)


def test_factorized_basis_matches_dense_eigh_signs():
    n = 10
    update = RankOneUpdate.self_loop(n, 1, 1.5)
    f = factorize(path_spectrum(n), update)
    basis = synthesize_basis(f, path_spectrum(n))
    reference = dense_eigh(_updated(n, update))
    assert np.allclose(basis, reference.U, atol=1e-10)


def test_apply_and_transpose_are_adjoint():
    n = 9
    base = path_spectrum(n)
    f = factorize(base, RankOneUpdate.edge(n, 2, 3, 1.5))
    rng = np.random.default_rng(4)
    t = rng.standard_normal(n)
    p = rng.standard_normal(n)
    assert p @ f.apply(t) == pytest.approx(f.apply_transpose(p) @ t, rel=1e-12)
    assert np.allclose(f.apply(t), f.cauchy_block() @ t)
    stacked = f.apply(np.column_stack([t, p]))
    assert np.allclose(stacked[:, 1], f.apply(p))


def test_progressive_forward_inverse_roundtrip():
    n = 16
    base = path_spectrum(n)
    f = factorize(base, RankOneUpdate.edge(n, 3, 5, 1.5))
    s = np.random.default_rng(2).standard_normal(n)
    p = progressive_forward(base, f, s)
    assert np.allclose(progressive_inverse(base, f, p), s, atol=1e-12)
    assert np.allclose(p, synthesize_basis(f, base).T @ s, atol=1e-12)


def test_progressive_on_dense_base():
    n = 8
    g = graph_with_update(GraphSpec.path(n), RankOneUpdate.self_loop(n, 1, 1.5))
    base = dense_eigh(build_laplacian(g))
    update = RankOneUpdate.self_loop(n, n, 0.7)
    transform = ProgressiveTransform(base, factorize(base, update))
    laplacian = apply_rank_one(build_laplacian(g), update).matrix
    matrix = transform.matrix()
    assert np.allclose(laplacian @ matrix, matrix * transform.lam, atol=1e-10)


def test_compose_rank_k_builds_two_stage_transform():
    n = 10
    updates = [RankOneUpdate.self_loop(n, 1, 1.5), RankOneUpdate.edge(n, 2, 3, 1.5)]
    transform = compose_rank_k(path_spectrum(n), updates)
    assert len(transform.stages) == 2
    laplacian = path_laplacian(n).matrix
    for update in updates:
        laplacian = laplacian + update.rho * np.outer(update.v, update.v)
    matrix = transform.matrix()
    assert np.allclose(matrix.T @ matrix, np.eye(n), atol=1e-10)
    assert np.allclose(laplacian @ matrix, matrix * transform.lam, atol=1e-9)
    s = np.random.default_rng(1).standard_normal(n)
    assert np.allclose(transform.synthesis(transform.analysis(s)), s, atol=1e-11)


def test_compose_rank_k_reports_stage_failures(monkeypatch: pytest.MonkeyPatch):
    with pytest.raises(InvalidUpdateError):
        compose_rank_k(path_spectrum(4), [])
    monkeypatch.setattr(spectral, "settings", Settings(secular_maxiter=1))
    n = 6
    with pytest.raises(DegenerateSpectrumError, match="stage 1"):
        compose_rank_k(path_spectrum(n), [RankOneUpdate.self_loop(n, 1, 1.5)])
